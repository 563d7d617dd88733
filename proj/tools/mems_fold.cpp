// mems-fold: command-line front end over the memsfold C interface.
#include "memsfold/memsfold.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(mf_status s)
{
    if (s != MF_OK)
        throw RuntimeFailure(std::string(mf_status_string(s)) + ": " + mf_last_error());
}

// Owns a string returned by the C interface.
std::string take(char* p)
{
    std::unique_ptr<char, void (*)(char*)> guard(p, mf_string_free);
    return p ? std::string(p) : std::string();
}

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f)
        throw RuntimeFailure("cannot write '" + path + "'");
    f << text;
    if (!f)
        throw RuntimeFailure("write failed for '" + path + "'");
}

const char* stability_name(mf_stability s)
{
    switch (s) {
    case MF_STABLE:
        return "stable";
    case MF_UNSTABLE:
        return "unstable";
    default:
        return "unknown";
    }
}

int type_code(const std::string& t)
{
    if (t == "I")
        return 1;
    if (t == "II")
        return 2;
    if (t == "III")
        return 3;
    return 0; // "all"
}

// ---- plot ----

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const
    {
        auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    }
};

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

Table read_csv(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw RuntimeFailure("cannot open '" + path + "'");
    Table t;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (t.header.empty())
            t.header = split_csv(line);
        else
            t.rows.push_back(split_csv(line));
    }
    if (t.header.empty())
        throw RuntimeFailure("'" + path + "' is empty");
    return t;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string render_svg(const Table& t, const std::string& xcol, const std::string& ycol, int width, int height)
{
    const int xi = t.column(xcol), yi = t.column(ycol);
    if (xi < 0 || yi < 0)
        throw RuntimeFailure("plot: columns '" + xcol + "' and '" + ycol + "' must exist in the input");
    int gi = t.column("branch_id");
    if (gi < 0)
        gi = t.column("kind");
    const int si = t.column("stability");

    struct Pt {
        double x, y;
        std::string stab;
    };
    std::map<std::string, std::vector<Pt>> groups;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& r : t.rows) {
        if (static_cast<int>(r.size()) <= std::max(xi, yi))
            continue;
        double x, y;
        try {
            x = std::stod(r[xi]);
            y = std::stod(r[yi]);
        } catch (const std::exception&) {
            continue;
        }
        if (!std::isfinite(x) || !std::isfinite(y))
            continue;
        const std::string g = gi >= 0 && gi < static_cast<int>(r.size()) ? r[gi] : "0";
        const std::string s = si >= 0 && si < static_cast<int>(r.size()) ? r[si] : "";
        groups[g].push_back({x, y, s});
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (groups.empty())
        throw RuntimeFailure("plot: no numeric rows");
    if (x1 == x0)
        x1 = x0 + 1.0;
    if (y1 == y0)
        y1 = y0 + 1.0;

    const double ml = 70, mr = 20, mt = 20, mb = 50;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto X = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto Y = [&](double y) { return mt + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        o << "<text x=\"" << X(xv) << "\" y=\"" << mt + ph + 18 << "\" text-anchor=\"middle\">" << fmt(xv)
          << "</text>\n";
        o << "<text x=\"" << ml - 6 << "\" y=\"" << Y(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">" << xcol
      << "</text>\n";
    o << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">" << ycol << "</text>\n";

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    int gidx = 0;
    for (const auto& [name, pts] : groups) {
        const char* colour = palette[gidx++ % 6];
        // stable segments solid, everything else dashed
        std::size_t i = 0;
        while (i + 1 < pts.size()) {
            const std::string s = pts[i].stab;
            std::size_t j = i + 1;
            while (j + 1 < pts.size() && pts[j].stab == s)
                ++j;
            o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\""
              << (s == "stable" || s.empty() ? "" : " stroke-dasharray=\"5,3\"") << " points=\"";
            for (std::size_t k = i; k <= j; ++k)
                o << X(pts[k].x) << "," << Y(pts[k].y) << " ";
            o << "\"/>\n";
            i = j;
        }
        if (pts.size() == 1)
            o << "<circle cx=\"" << X(pts[0].x) << "\" cy=\"" << Y(pts[0].y) << "\" r=\"3\" fill=\"" << colour
              << "\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Steady states, folds and singular limits of the MEMS boundary value problem"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "Flat key = value configuration file")->check(CLI::ExistingFile);

    std::string out;
    double eps = 0.0, lambda = 0.0, delta = 0.5, u_min = 0.5;
    std::vector<double> eps_list;
    bool all = false, no_stability = false;
    int grid = 0;
    std::string type = "all", what, in, profiles, profile, xcol = "lambda", ycol = "norm_u2";

    auto* solve = app.add_subcommand("solve", "All steady states at fixed (eps, lambda)");
    solve->add_option("--eps", eps, "Permittivity parameter")->required()->check(CLI::Range(0.0, 1.0));
    solve->add_option("--lambda", lambda, "Voltage parameter")->required()->check(CLI::PositiveNumber);
    solve->add_flag("--all", all, "Report every solution, not only the smallest-norm one");
    solve->add_option("--profiles", profiles, "Write sampled profiles as CSV");
    solve->add_option("--out", out, "Output JSON path (default stdout)");

    auto* branch = app.add_subcommand("branch", "Continuation of the S-shaped branch");
    auto* beps = branch->add_option("--eps", eps, "Permittivity parameter")->check(CLI::Range(0.0, 1.0));
    auto* blist = branch->add_option("--eps-list", eps_list, "Several eps values, one branch id each")
                      ->delimiter(',')
                      ->check(CLI::Range(0.0, 1.0));
    beps->excludes(blist);
    branch->add_flag("--no-stability", no_stability, "Skip the stability classification");
    branch->add_option("--out", out, "Output CSV path (default stdout)");

    auto* folds = app.add_subcommand("folds", "Fold locations against the asymptotic law");
    folds->add_option("--eps-list", eps_list, "Comma-separated eps values")
        ->required()
        ->delimiter(',')
        ->check(CLI::Range(0.0, 0.1));
    folds->add_option("--out", out, "Output JSON path (default stdout)");

    auto* singular = app.add_subcommand("singular", "Singular orbits and the eps = 0 diagram");
    singular->add_option("--type", type, "I, II, III or all")->check(CLI::IsMember({"I", "II", "III", "all"}));
    singular->add_option("--delta", delta, "delta for type I")->check(CLI::Range(0.0, 1.1547));
    singular->add_option("--u-min", u_min, "u_min for the type-III profile")->check(CLI::Range(1e-9, 1.0));
    singular->add_option("--grid", grid, "Samples on the type-III arc")->check(CLI::Range(2, 1000000));
    singular->add_option("--profile", profile, "Also write the x,u,w profile as CSV");
    singular->add_option("--out", out, "Output CSV path (default stdout)");

    auto* charts = app.add_subcommand("charts", "Blow-up chart utilities");
    charts->require_subcommand(1);
    auto* charts_check = charts->add_subcommand("check", "Run the chart invariant suite");
    charts_check->add_option("--out", out, "Output JSON path (default stdout)");

    auto* compare = app.add_subcommand("compare", "Numerics against asymptotic formulas");
    compare->add_option("--what", what, "lambda-star, norm-upper, xi-out or slope")
        ->required()
        ->check(CLI::IsMember({"lambda-star", "norm-upper", "xi-out", "slope"}));
    compare->add_option("--eps", eps, "eps for norm-upper and slope")->check(CLI::Range(0.0, 1.0));
    compare->add_option("--eps-list", eps_list, "eps values for lambda-star and xi-out")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0));
    compare->add_option("--delta", delta, "delta for xi-out")->check(CLI::NonNegativeNumber);
    compare->add_option("--out", out, "Output CSV path (default stdout)");

    auto* plot = app.add_subcommand("plot", "SVG plot of a branch or singular CSV");
    plot->add_option("--in", in, "Input CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", out, "Output SVG path")->required();
    plot->add_option("--x", xcol, "Column for the horizontal axis");
    plot->add_option("--y", ycol, "Column for the vertical axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        mf_config cfg;
        mf_config_default(&cfg);
        if (!config_path.empty())
            check(mf_config_load(config_path.c_str(), &cfg));

        if (*solve) {
            mf_solutions* raw = nullptr;
            check(mf_solve(eps, lambda, &cfg, &raw));
            std::unique_ptr<mf_solutions, void (*)(mf_solutions*)> sols(raw, mf_solutions_free);
            const size_t n = mf_solutions_count(sols.get());
            if (n == 0)
                throw RuntimeFailure("no solution found");
            const size_t shown = all ? n : 1;
            nlohmann::json j = {{"eps", eps}, {"lambda", lambda}, {"count", n}};
            nlohmann::json arr = nlohmann::json::array();
            std::string csv = "solution,x,u,w\n";
            for (size_t i = 0; i < shown; ++i) {
                double w0 = 0, N = 0;
                mf_stability st;
                check(mf_solution_info(sols.get(), i, &w0, &N, &st));
                arr.push_back({{"index", i}, {"w0", w0}, {"norm_u2", N}, {"stability", stability_name(st)}});
                const double *x, *u, *w;
                size_t m = 0;
                check(mf_solution_profile(sols.get(), i, &x, &u, &w, &m));
                char buf[96];
                for (size_t k = 0; k < m; ++k) {
                    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, x[k], u[k], w[k]);
                    csv += buf;
                }
            }
            j["solutions"] = arr;
            emit(j.dump(2) + "\n", out);
            if (!profiles.empty())
                emit(csv, profiles);
        } else if (*branch) {
            if (eps_list.empty())
                eps_list.push_back(eps);
            std::string csv;
            for (size_t b = 0; b < eps_list.size(); ++b) {
                mf_branch* raw = nullptr;
                check(mf_branch_compute(eps_list[b], &cfg, no_stability ? 0 : 1, &raw));
                std::unique_ptr<mf_branch, void (*)(mf_branch*)> br(raw, mf_branch_free);
                csv += take([&] {
                    char* s = nullptr;
                    check(mf_branch_csv(br.get(), static_cast<int>(b), b == 0 ? 1 : 0, &s));
                    return s;
                }());
                for (size_t k = 0; k < mf_branch_fold_count(br.get()); ++k) {
                    mf_fold f;
                    check(mf_branch_get_fold(br.get(), k, &f));
                    std::fprintf(stderr, "eps=%.6g fold %s lambda=%.12g norm_u2=%.12g\n", eps_list[b],
                                 f.kind == MF_FOLD_LOWER ? "lower" : "upper", f.lambda, f.norm2);
                }
                if (mf_branch_truncated(br.get()))
                    std::fprintf(stderr, "eps=%.6g warning: branch truncated (corrector failed at h_min)\n",
                                 eps_list[b]);
            }
            emit(csv, out);
        } else if (*folds) {
            char* s = nullptr;
            check(mf_fold_report_json(eps_list.data(), eps_list.size(), &cfg, &s));
            emit(take(s), out);
        } else if (*singular) {
            const int g = grid > 0 ? grid : cfg.singular_grid;
            const int code = type_code(type);
            char* s = nullptr;
            check(mf_singular_csv(code, delta, g, &s));
            emit(take(s), out);
            if (!profile.empty()) {
                if (code == 0)
                    throw RuntimeFailure("--profile needs --type I, II or III");
                char* p = nullptr;
                check(mf_singular_profile_csv(code, code == 1 ? delta : u_min, &p));
                emit(take(p), profile);
            }
        } else if (*charts) {
            char* s = nullptr;
            int pass = 0;
            check(mf_charts_check_json(&cfg, &s, &pass));
            const std::string text = take(s);
            emit(text, out);
            if (!pass) {
                const auto report = nlohmann::json::parse(text);
                for (const auto& it : report["checks"])
                    if (!it["pass"].get<bool>())
                        std::fprintf(stderr, "FAIL %s: %s\n", it["name"].get<std::string>().c_str(),
                                     it["detail"].get<std::string>().c_str());
                return kExitRuntime;
            }
        } else if (*compare) {
            if ((what == "lambda-star" || what == "xi-out") && eps_list.empty())
                throw CLI::ValidationError("--eps-list", "required for --what " + what);
            if ((what == "norm-upper" || what == "slope") && !(eps > 0.0))
                throw CLI::ValidationError("--eps", "a positive value is required for --what " + what);
            char* s = nullptr;
            check(mf_compare_csv(what.c_str(), eps, delta, eps_list.data(), eps_list.size(), &cfg, &s));
            emit(take(s), out);
        } else if (*plot) {
            emit(render_svg(read_csv(in), xcol, ycol, cfg.plot_width, cfg.plot_height), out);
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
