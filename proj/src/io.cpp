#include "kdecf/io.hpp"

#include "kdecf/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kdecf::io {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_double(std::string_view s)
{
    std::string t = trim(s);
    if (t.empty())
        return std::nullopt;
    double v = 0.0;
    const char* begin = t.data();
    if (*begin == '+')
        ++begin;
    auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        return std::nullopt;
    return v;
}

json optional_num(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

} // namespace

std::string num(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

Sample read_sample_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read sample file '" + path.string() + "'");
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        // first column only
        auto comma = t.find(',');
        std::string cell = trim(std::string_view(t).substr(0, comma));
        auto v = parse_double(cell);
        if (!v) {
            if (!seen_content) {
                seen_content = true;
                continue;
            }
            throw ConfigError("'" + path.string() + "' line " + std::to_string(lineno) + ": not a number: " + cell);
        }
        seen_content = true;
        values.push_back(*v);
    }
    if (values.empty())
        throw ConfigError("sample file '" + path.string() + "' holds no observations");
    return Sample(std::move(values));
}

void write_atomic(const std::filesystem::path& path, std::string_view content)
{
    namespace fs = std::filesystem;
    fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot write '" + path.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw ConfigError("write failed for '" + path.string() + "'");
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw ConfigError("cannot move output into place at '" + path.string() + "': " + ec.message());
    }
}

DensitySpec parse_density_spec(std::string_view text)
{
    DensitySpec spec;
    auto colon = text.find(':');
    spec.name = trim(text.substr(0, colon));
    if (spec.name.empty())
        throw ConfigError("empty density name");
    if (colon == std::string_view::npos)
        return spec;
    std::string rest(text.substr(colon + 1));
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("density parameter '" + item + "' is not key=value");
        std::string key = trim(std::string_view(item).substr(0, eq));
        std::stringstream vs(item.substr(eq + 1));
        std::string part;
        std::vector<double> vals;
        while (std::getline(vs, part, '|')) {
            auto v = parse_double(part);
            if (!v)
                throw ConfigError("density parameter '" + key + "' has non-numeric value '" + part + "'");
            vals.push_back(*v);
        }
        spec.params[key] = std::move(vals);
    }
    return spec;
}

std::string grid_csv(const EstimateGrid& g)
{
    std::string out = "x,y\n";
    for (std::size_t i = 0; i < g.xs.size(); ++i)
        out += num(g.xs[i]) + "," + num(g.ys[i]) + "\n";
    return out;
}

json grid_sidecar(const EstimateGrid& g, std::size_t n)
{
    json j;
    j["kernel"] = g.kernel_name;
    j["h"] = g.h;
    j["n"] = n;
    j["points"] = g.xs.size();
    j["x_min"] = g.xs.empty() ? 0.0 : g.xs.front();
    j["x_max"] = g.xs.empty() ? 0.0 : g.xs.back();
    j["integral"] = g.integral();
    j["corrected"] = g.corrected;
    j["xi"] = optional_num(g.xi);
    return j;
}

json to_json(const RiskReport& r)
{
    json j;
    j["mise"] = r.mise;
    j["quad_error"] = r.quad_error;
    j["degraded"] = r.degraded;
    j["inputs"] = {{"density", r.inputs.density}, {"kernel", r.inputs.kernel}, {"h", r.inputs.h}, {"n", r.inputs.n}};
    if (!r.mse_at.empty()) {
        json m = json::array();
        for (auto [x, v] : r.mse_at)
            m.push_back({{"x", x}, {"mse", v}, {"bias", r.bias_at.at(x)}});
        j["pointwise"] = m;
    }
    return j;
}

json to_json(const SelectorResult& r)
{
    json j;
    j["method"] = r.method;
    j["h"] = r.h;
    j["metadata"] = {{"n", r.n}, {"kernel", r.kernel}, {"q_estimator", r.q_estimator}};
    j["degenerate"] = r.degenerate;
    if (!r.warning.empty())
        j["warning"] = r.warning;
    if (!r.curve.empty()) {
        json c = json::array();
        for (auto [h, q] : r.curve)
            c.push_back({{"h", h}, {"q", q}});
        j["criterion_curve"] = c;
    }
    return j;
}

json to_json(const BoundResult& r)
{
    json j;
    j["theorem_id"] = r.theorem_id;
    j["kind"] = to_string(r.kind);
    j["estimator"] = r.sinc ? "sinc" : "kernel";
    j["h0"] = r.h0;
    j["h_used"] = r.h_used;
    j["n"] = r.n;
    j["rate_exponent"] = r.rate_exponent;
    j["applicable"] = r.applicable();
    j["bound"] = optional_num(r.bound);
    json a = json::array();
    for (const auto& x : r.assumptions)
        a.push_back({{"name", x.name}, {"satisfied", x.satisfied}, {"machine_checked", x.machine_checked}});
    j["assumptions"] = a;
    if (r.optimal)
        j["optimal"] = {{"h0_star", r.optimal->h0_star},
                        {"h_star", r.optimal->h_star},
                        {"minimized_bound", r.optimal->minimized}};
    return j;
}

std::string bound_table_csv(const std::vector<BoundRow>& rows)
{
    std::string out = "theorem_id,kind,h_n,n,bound,exact,ratio,applicable\n";
    for (const auto& row : rows) {
        const auto& b = row.bound;
        out += b.theorem_id + "," + to_string(b.kind) + ",";
        out += (b.h_used > 0.0 ? num(b.h_used) : std::string()) + "," + std::to_string(b.n) + ",";
        out += (b.bound ? num(*b.bound) : std::string()) + ",";
        out += (row.exact ? num(*row.exact) : std::string()) + ",";
        if (b.bound && row.exact && *row.exact > 0.0)
            out += num(*b.bound / *row.exact);
        out += std::string(",") + (b.applicable() ? "true" : "false") + "\n";
    }
    return out;
}

} // namespace kdecf::io
