#include "kdecf/cli.hpp"

#include "kdecf/bounds.hpp"
#include "kdecf/errors.hpp"
#include "kdecf/estimator.hpp"
#include "kdecf/io.hpp"
#include "kdecf/risk.hpp"
#include "kdecf/selector.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace kdecf::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

struct MissingOption : ConfigError {
    using ConfigError::ConfigError;
};

struct OptionSpec {
    std::string name;
    std::string help;
    bool is_flag = false;
};

const std::vector<OptionSpec> kCommon = {
    {"config", "JSON file with option values (flags take precedence)"},
    {"output", "output file path (default: $KDECF_OUTPUT_DIR/<command>.<ext>)"},
    {"format", "csv or json"},
    {"seed", "random seed"},
    {"dump-config", "print the resolved configuration and exit", true},
};

const std::map<std::string, std::vector<OptionSpec>> kCommands = {
    {"estimate",
     {{"input", "one-column CSV sample"},
      {"kernel", "gaussian | epanechnikov | uniform | sinc"},
      {"h", "bandwidth"},
      {"method", "bandwidth selector when h is absent: rot-normal | ucv | cv-parametric"},
      {"points", "number of grid points"},
      {"correct", "apply the density correction max(p - xi, 0)", true}}},
    {"risk",
     {{"density", "density spec, e.g. normal:mu=0,sigma=1"},
      {"kernel", "gaussian | epanechnikov | uniform | sinc"},
      {"n", "sample size"},
      {"h", "comma-separated bandwidths"},
      {"h-grid", "log-spaced grid lo:hi:count"},
      {"mc", "Monte-Carlo replications per bandwidth (0 = off)"}}},
    {"bounds",
     {{"density", "density spec"}, {"kernel", "kernel for the conventional bounds"}, {"n", "sample size"}}},
    {"select",
     {{"input", "one-column CSV sample"},
      {"method", "rot-normal | ucv | cv-parametric | bound-mise | bound-maxmse"},
      {"kernel", "kernel name"},
      {"h-grid", "log-spaced grid lo:hi:count"},
      {"form", "criterion form: full | lemma2"},
      {"sigma", "scale estimate (overrides the sample sd)"},
      {"n", "sample size (overrides the sample size)"},
      {"v2", "upper bound on V(p'')"},
      {"v3", "upper bound on V(p''')"},
      {"a", "upper bound on sup p"}}},
    {"plan",
     {{"target", "mise | max_mse"},
      {"estimator", "kernel | sinc-nonsmooth | sinc-smooth"},
      {"eps", "accuracy threshold"},
      {"kernel", "kernel name"},
      {"v2", "upper bound on V(p'')"},
      {"v3", "upper bound on V(p''')"},
      {"a", "upper bound on sup p"},
      {"v", "variation constant for the sinc regimes"},
      {"m", "smoothness order for sinc-smooth"}}},
};

json defaults_for(const std::string& cmd)
{
    json d = {{"format", "csv"}, {"seed", 12345}, {"kernel", "gaussian"}};
    if (cmd == "estimate")
        d["points"] = 512;
    if (cmd == "risk")
        d["mc"] = 0;
    if (cmd == "select") {
        d["format"] = "json";
        d["method"] = "ucv";
        d["form"] = "full";
    }
    if (cmd == "plan") {
        d["format"] = "json";
        d["target"] = "mise";
        d["estimator"] = "kernel";
        d["m"] = 2;
    }
    return d;
}

class Config {
public:
    explicit Config(json j) : j_(std::move(j)) {}

    const json& raw() const { return j_; }

    bool has(const std::string& key) const { return j_.contains(key) && !j_[key].is_null(); }

    std::string str(const std::string& key) const
    {
        require(key);
        const auto& v = j_[key];
        return v.is_string() ? v.get<std::string>() : v.dump();
    }

    double dbl(const std::string& key) const
    {
        require(key);
        const auto& v = j_[key];
        if (v.is_number())
            return v.get<double>();
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size())
            throw ConfigError("option --" + key + " expects a number, got '" + s + "'");
        return out;
    }

    std::optional<double> opt_dbl(const std::string& key) const
    {
        return has(key) ? std::optional<double>(dbl(key)) : std::nullopt;
    }

    long long integer(const std::string& key) const
    {
        double v = dbl(key);
        if (v != std::floor(v) || std::abs(v) > 9e15)
            throw ConfigError("option --" + key + " expects an integer");
        return static_cast<long long>(v);
    }

    std::size_t positive_count(const std::string& key) const
    {
        long long v = integer(key);
        if (v < 1)
            throw ConfigError("option --" + key + " must be a positive integer");
        return static_cast<std::size_t>(v);
    }

    bool flag(const std::string& key) const
    {
        if (!has(key))
            return false;
        const auto& v = j_[key];
        if (v.is_boolean())
            return v.get<bool>();
        if (v.is_number())
            return v.get<double>() != 0.0;
        std::string s = v.get<std::string>();
        return s == "true" || s == "1" || s == "yes";
    }

    void require(const std::string& key) const
    {
        if (!has(key))
            throw MissingOption("missing required option --" + key);
    }

private:
    json j_;
};

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("not a number in list: '" + item + "'");
        }
    }
    return out;
}

std::vector<double> parse_log_grid(const std::string& text)
{
    auto parts = parse_list([&] {
        std::string t = text;
        std::replace(t.begin(), t.end(), ':', ',');
        return t;
    }());
    if (parts.size() != 3 || !(parts[0] > 0.0) || !(parts[1] >= parts[0]) || parts[2] < 1
        || parts[2] != std::floor(parts[2]))
        throw ConfigError("grid must be lo:hi:count with 0 < lo <= hi and count >= 1");
    const auto count = static_cast<std::size_t>(parts[2]);
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i) {
        double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        g[i] = std::exp(std::log(parts[0]) + t * (std::log(parts[1]) - std::log(parts[0])));
    }
    return g;
}

std::vector<double> bandwidths(const Config& c)
{
    std::vector<double> hs;
    if (c.has("h"))
        hs = parse_list(c.str("h"));
    if (c.has("h-grid")) {
        auto g = parse_log_grid(c.str("h-grid"));
        hs.insert(hs.end(), g.begin(), g.end());
    }
    if (hs.empty())
        throw MissingOption("missing required option --h or --h-grid");
    for (double h : hs)
        if (!(h > 0.0))
            throw ConfigError("bandwidths must be positive");
    return hs;
}

std::string format_of(const Config& c)
{
    std::string f = c.str("format");
    if (f != "csv" && f != "json")
        throw ConfigError("--format must be csv or json");
    return f;
}

fs::path output_path(const Config& c, const std::string& cmd, const std::string& ext)
{
    if (c.has("output"))
        return c.str("output");
    const char* dir = std::getenv("KDECF_OUTPUT_DIR");
    return fs::path(dir && *dir ? dir : ".") / (cmd + "." + ext);
}

void check_writable(const fs::path& p)
{
    fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir))
        throw ConfigError("output directory '" + dir.string() + "' is not usable");
    fs::path probe = dir / ("." + p.filename().string() + ".probe");
    {
        std::ofstream f(probe);
        if (!f)
            throw ConfigError("output directory '" + dir.string() + "' is not writable");
    }
    fs::remove(probe, ec);
}

DensityModel density_of(const Config& c)
{
    auto spec = io::parse_density_spec(c.str("density"));
    return make_density(spec.name, spec.params);
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

SelectorResult select_bandwidth(const Config& c, const Sample& s, const KernelModel& k, const std::string& method)
{
    if (method == "rot-normal") {
        double sigma = c.has("sigma") ? c.dbl("sigma") : s.sd();
        std::size_t n = c.has("n") ? c.positive_count("n") : s.size();
        return rule_of_thumb_normal(sigma, n);
    }
    if (method == "ucv" || method == "cv-parametric") {
        CvOptions opt;
        opt.q = method == "ucv" ? QEstimator::unbiased : QEstimator::parametric;
        if (c.has("sigma"))
            opt.sigma_hat = c.dbl("sigma");
        if (c.has("form")) {
            std::string f = c.str("form");
            if (f != "full" && f != "lemma2")
                throw ConfigError("--form must be full or lemma2");
            opt.form = f == "full" ? CvForm::full : CvForm::lemma2;
        }
        if (c.has("h-grid"))
            return cv_bandwidth(s, k, parse_log_grid(c.str("h-grid")), opt);
        return cv_bandwidth(s, k, opt);
    }
    if (method == "bound-mise" || method == "bound-maxmse") {
        BoundRuleConstants bc{c.opt_dbl("v2"), c.opt_dbl("v3"), c.opt_dbl("a")};
        std::size_t n = c.has("n") ? c.positive_count("n") : s.size();
        return bound_rule(method == "bound-mise" ? BoundRuleKind::mise_thm1 : BoundRuleKind::maxmse_thm3, bc, k, n);
    }
    throw ConfigError("unknown method '" + method + "'");
}

int cmd_estimate(const Config& c, std::ostream& out)
{
    auto k = make_builtin(c.str("kernel"));
    Sample s = io::read_sample_csv(c.str("input"));
    double h;
    if (c.has("h")) {
        h = c.dbl("h");
        if (!(h > 0.0))
            throw ConfigError("--h must be positive");
    } else if (c.has("method")) {
        auto sel_kernel = k.is_sinc ? make_builtin("gaussian") : k;
        h = select_bandwidth(c, s, sel_kernel, c.str("method")).h;
    } else {
        throw MissingOption("missing required option --h or --method");
    }
    const auto path = output_path(c, "estimate", "csv");
    check_writable(path);

    auto grid = kde_grid(s, k, h, default_grid(s, h, c.positive_count("points")));
    if (c.flag("correct"))
        grid = correct_to_density(grid);
    io::write_atomic(path, io::grid_csv(grid));
    fs::path side = path;
    side.replace_extension(".json");
    io::write_atomic(side, dump(io::grid_sidecar(grid, s.size())));
    out << "wrote " << path.string() << " and " << side.string() << "\n";
    return kExitOk;
}

int cmd_risk(const Config& c, std::ostream& out)
{
    auto d = density_of(c);
    auto k = make_builtin(c.str("kernel"));
    const std::size_t n = c.positive_count("n");
    const auto hs = bandwidths(c);
    const auto reps = static_cast<std::size_t>(std::max<long long>(0, c.integer("mc")));
    const auto seed = static_cast<std::uint64_t>(c.integer("seed"));
    const std::string fmt = format_of(c);
    const auto path = output_path(c, "risk", fmt);
    check_writable(path);

    json rows = json::array();
    std::string csv = reps > 0 ? "h,mise,quad_error,mc_mise,mc_se\n" : "h,mise,quad_error\n";
    for (double h : hs) {
        RiskReport r = k.is_sinc ? sinc_exact_mise(d, h, n) : exact_mise(d, k, h, n);
        json row = io::to_json(r);
        csv += io::num(h) + "," + io::num(r.mise) + "," + io::num(r.quad_error);
        if (reps > 0) {
            auto mc = mc_mise(d, k, h, n, reps, seed);
            row["mc_mise"] = mc.estimate;
            row["mc_se"] = mc.std_error ? json(*mc.std_error) : json(nullptr);
            csv += "," + io::num(mc.estimate) + "," + (mc.std_error ? io::num(*mc.std_error) : std::string());
        }
        csv += "\n";
        rows.push_back(row);
    }
    io::write_atomic(path, fmt == "csv" ? csv : dump(rows));
    out << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_bounds(const Config& c, std::ostream& out)
{
    auto d = density_of(c);
    auto k = make_builtin(c.str("kernel"));
    const std::size_t n = c.positive_count("n");
    const std::string fmt = format_of(c);
    const auto path = output_path(c, "bounds", fmt);
    check_writable(path);

    const auto xs = mse_grid(d);
    std::vector<io::BoundRow> rows;
    for (auto& b : bound_table(d, k, n)) {
        io::BoundRow row{b, std::nullopt};
        if (b.applicable()) {
            try {
                row.exact = exact_counterpart(b, d, k, xs);
            } catch (const std::exception&) {
                row.exact = std::nullopt;
            }
        }
        rows.push_back(std::move(row));
    }
    if (fmt == "csv") {
        io::write_atomic(path, io::bound_table_csv(rows));
    } else {
        json arr = json::array();
        for (const auto& r : rows) {
            json j = io::to_json(r.bound);
            j["exact"] = r.exact ? json(*r.exact) : json(nullptr);
            arr.push_back(j);
        }
        io::write_atomic(path, dump(arr));
    }
    out << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_select(const Config& c, std::ostream& out)
{
    const std::string method = c.str("method");
    auto k = make_builtin(c.str("kernel"));
    const bool needs_sample = !(method == "rot-normal" && c.has("sigma") && c.has("n"))
                              && !((method == "bound-mise" || method == "bound-maxmse") && c.has("n"));
    std::optional<Sample> s;
    if (needs_sample)
        s = io::read_sample_csv(c.str("input"));
    const auto path = c.has("output") ? std::optional<fs::path>(output_path(c, "select", "json")) : std::nullopt;
    if (path)
        check_writable(*path);

    SelectorResult r = s ? select_bandwidth(c, *s, k, method) : select_bandwidth(c, Sample({0.0}), k, method);
    std::string text = dump(io::to_json(r));
    if (path) {
        io::write_atomic(*path, text);
        out << "h=" << io::num(r.h) << "\nwrote " << path->string() << "\n";
    } else {
        out << text;
    }
    return kExitOk;
}

int cmd_plan(const Config& c, std::ostream& out)
{
    PlanRequest req;
    const std::string target = c.str("target");
    if (target != "mise" && target != "max_mse")
        throw ConfigError("--target must be mise or max_mse");
    req.target = target == "mise" ? PlanTarget::mise : PlanTarget::max_mse;
    const std::string est = c.str("estimator");
    if (est == "kernel")
        req.estimator = PlanEstimator::kernel;
    else if (est == "sinc-nonsmooth")
        req.estimator = PlanEstimator::sinc_nonsmooth;
    else if (est == "sinc-smooth")
        req.estimator = PlanEstimator::sinc_smooth;
    else
        throw ConfigError("--estimator must be kernel, sinc-nonsmooth or sinc-smooth");
    req.epsilon = c.dbl("eps");
    req.v2 = c.opt_dbl("v2");
    req.v3 = c.opt_dbl("v3");
    req.a = c.opt_dbl("a");
    req.v = c.opt_dbl("v");
    req.m = static_cast<int>(c.integer("m"));
    auto k = make_builtin(c.str("kernel"));
    auto plan = plan_sample_size(req, k);
    out << "n0=" << plan.n0 << " bound=" << io::num(plan.bound) << " h=" << io::num(plan.h) << " via "
        << plan.theorem_id << "\n";
    if (c.has("output")) {
        const auto path = output_path(c, "plan", "json");
        json j = {{"n0", plan.n0}, {"bound", plan.bound}, {"h", plan.h}, {"theorem_id", plan.theorem_id},
                  {"epsilon", req.epsilon}};
        io::write_atomic(path, dump(j));
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Kernel and sinc density estimation with exact risk and risk bounds", "kdecf"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, bool>> flags;
    std::map<std::string, CLI::App*> subs;
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    const std::map<std::string, std::string> about = {
        {"estimate", "density estimate on a grid from a sample file"},
        {"risk", "exact MISE over a bandwidth grid for a built-in density"},
        {"bounds", "table of risk bounds against exact risk"},
        {"select", "data-driven or bound-based bandwidth"},
        {"plan", "sample size guaranteeing a risk threshold"},
    };
    for (const auto& [cmd, specific] : kCommands) {
        auto* sub = app.add_subcommand(cmd, about.at(cmd));
        subs[cmd] = sub;
        auto all = kCommon;
        all.insert(all.end(), specific.begin(), specific.end());
        for (const auto& o : all) {
            if (o.is_flag)
                opts[cmd][o.name] = sub->add_flag("--" + o.name, flags[cmd][o.name], o.help);
            else
                opts[cmd][o.name] = sub->add_option("--" + o.name, values[cmd][o.name], o.help);
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        for (const auto& [cmd, sub] : subs)
            if (sub->parsed()) {
                err << sub->help();
                return kExitUsage;
            }
        err << app.help();
        return kExitUsage;
    }

    std::string cmd;
    for (const auto& [name, sub] : subs)
        if (sub->parsed())
            cmd = name;
    CLI::App* sub = subs.at(cmd);

    try {
        json cfg = defaults_for(cmd);
        cfg["command"] = cmd;
        if (opts[cmd]["config"]->count() > 0) {
            std::ifstream f(values[cmd]["config"]);
            if (!f)
                throw ConfigError("cannot read config file '" + values[cmd]["config"] + "'");
            json file;
            try {
                file = json::parse(f);
            } catch (const json::exception& e) {
                throw ConfigError("config file '" + values[cmd]["config"] + "' is not valid JSON: " + e.what());
            }
            if (!file.is_object())
                throw ConfigError("config file must hold a JSON object");
            if (file.contains(cmd) && file[cmd].is_object())
                file = file[cmd];
            for (auto& [key, v] : file.items())
                if (opts[cmd].count(key) && key != "config")
                    cfg[key] = v;
        }
        for (const auto& [name, opt] : opts[cmd]) {
            if (opt->count() == 0 || name == "config" || name == "dump-config")
                continue;
            if (flags[cmd].count(name))
                cfg[name] = flags[cmd][name];
            else
                cfg[name] = values[cmd][name];
        }
        if (flags[cmd]["dump-config"]) {
            out << dump(cfg);
            return kExitOk;
        }
        Config c(cfg);
        if (cmd == "estimate")
            return cmd_estimate(c, out);
        if (cmd == "risk")
            return cmd_risk(c, out);
        if (cmd == "bounds")
            return cmd_bounds(c, out);
        if (cmd == "select")
            return cmd_select(c, out);
        return cmd_plan(c, out);
    } catch (const MissingOption& e) {
        err << "error: " << e.what() << "\n" << sub->help();
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UnsupportedKernelError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

} // namespace kdecf::cli
