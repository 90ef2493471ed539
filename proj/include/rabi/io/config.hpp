// config.hpp: Run configuration: a line-oriented `key = value` format
//
//   # comment
//   model.g = 4
//   points = "C1;R1"          # names or q1,p1,q2,p2 tuples, ';'-separated
//
// Omitted keys keep their defaults, unknown or repeated keys are errors, and
// serialize() writes every key so that parse_config(serialize(c)) == c.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rabi/diagnostics.hpp"
#include "rabi/errors.hpp"
#include "rabi/grid.hpp"
#include "rabi/model.hpp"
#include "rabi/quantum.hpp"
#include "rabi/sweep.hpp"

namespace rabi::io {

struct PointSpec {
    std::string label;  // "R1", "C1", or "p<k>" for an explicit tuple at list position k
    PhasePoint point;

    friend bool operator==(const PointSpec&, const PointSpec&) = default;
};

struct PoincareConfig {
    std::size_t seeds{50};
    double seed_q1_min{-1.4};
    double seed_q1_max{1.4};
    double seed_p1{0.0};
    std::size_t crossings{400};
    double tol{1e-10};
    double t_max{1e5};
    bool include_points{true};

    friend bool operator==(const PoincareConfig&, const PoincareConfig&) = default;
};

struct ConvergenceConfig {
    std::vector<int> n_list{60, 150, 200};
    double t_max{100.0};

    friend bool operator==(const ConvergenceConfig&, const ConvergenceConfig&) = default;
};

struct RunConfig {
    ModelParams params;
    FockConfig fock;
    double energy{kDefaultEnergy};
    double t_max{500.0};
    double dt{0.5};
    std::vector<PointSpec> points{{"C1", points::C1}, {"R1", points::R1}};
    SectionGridSpec section;
    HusimiGrid husimi;
    std::vector<double> husimi_times{0.0, 5.0, 20.0, 100.0, 500.0};
    PoincareConfig poincare;
    ConvergenceConfig convergence;
    unsigned workers{1};
    std::string out{"out"};
    bool pgm{true};

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    void validate() const;
};

namespace detail {

// Shortest text that parses back to exactly v.
inline std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

inline std::string key_prefix(const std::string& key) { return key.empty() ? std::string() : key + ": "; }

inline double parse_double(const std::string& text, const std::string& key, std::size_t line) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError(key_prefix(key) + "expected a number, got '" + text + "'", line);
    }
    if (!std::isfinite(v)) throw ConfigError(key_prefix(key) + "value must be finite", line);
    return v;
}

inline long long parse_int(const std::string& text, const std::string& key, std::size_t line) {
    long long v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError(key_prefix(key) + "expected an integer, got '" + text + "'", line);
    }
    return v;
}

inline bool parse_bool(const std::string& text, const std::string& key, std::size_t line) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError(key_prefix(key) + "expected true or false, got '" + text + "'", line);
}

template <class T>
std::string join(const std::vector<T>& xs, auto&& fmt) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ";" : "") + fmt(xs[i]);
    return s;
}

inline std::string quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') q += '\\';
        q += c;
    }
    return q + "\"";
}

// Splits `key = value  # comment`, unquoting a quoted value.
inline std::pair<std::string, std::string> split_line(const std::string& raw, std::size_t line) {
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    std::string key = trim(std::string_view(raw).substr(0, eq));
    if (key.empty()) throw ConfigError("missing key before '='", line);

    const std::string rest = trim(std::string_view(raw).substr(eq + 1));
    std::string value;
    std::size_t i = 0;
    if (!rest.empty() && rest[0] == '"') {
        bool closed = false;
        for (i = 1; i < rest.size(); ++i) {
            if (rest[i] == '\\' && i + 1 < rest.size()) {
                value += rest[++i];
            } else if (rest[i] == '"') {
                closed = true;
                ++i;
                break;
            } else {
                value += rest[i];
            }
        }
        if (!closed) throw ConfigError(key + ": unterminated string", line);
        const std::string tail = trim(std::string_view(rest).substr(i));
        if (!tail.empty() && tail[0] != '#') throw ConfigError(key + ": unexpected text after string", line);
    } else {
        value = trim(std::string_view(rest).substr(0, rest.find('#')));
    }
    return {key, value};
}

} // namespace detail

// "R1", "C1" or "q1,p1,q2,p2"; `index` names explicit points.
inline PointSpec parse_point(const std::string& text, std::size_t index, std::size_t line = 0) {
    const std::string t = detail::trim(text);
    if (t == "R1") return {"R1", points::R1};
    if (t == "C1") return {"C1", points::C1};
    const auto parts = detail::split(t, ',');
    if (parts.size() != 4) {
        throw ConfigError("point '" + t + "' is neither R1, C1 nor a q1,p1,q2,p2 tuple", line);
    }
    const std::string what = "point '" + t + "'";
    PhasePoint x{detail::parse_double(parts[0], what, line), detail::parse_double(parts[1], what, line),
                 detail::parse_double(parts[2], what, line), detail::parse_double(parts[3], what, line)};
    return {"p" + std::to_string(index), x};
}

inline std::vector<PointSpec> parse_points(const std::string& text, std::size_t line = 0) {
    std::vector<PointSpec> pts;
    for (const auto& item : detail::split(text, ';')) pts.push_back(parse_point(item, pts.size(), line));
    return pts;
}

inline std::string format_point(const PointSpec& p) {
    if (p.label == "R1" && p.point == points::R1) return "R1";
    if (p.label == "C1" && p.point == points::C1) return "C1";
    using detail::format_number;
    return format_number(p.point.q1) + "," + format_number(p.point.p1) + "," + format_number(p.point.q2) + "," +
           format_number(p.point.p2);
}

namespace detail {

inline void check_axis(const Axis& a, const std::string& prefix) {
    try {
        a.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(prefix + ": " + e.what());
    }
}

} // namespace detail

inline void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("model.") + e.what());
    }
    fock.validate();
    if (!std::isfinite(energy)) throw ValidationError("shell.energy must be finite");
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ValidationError("time.t_max must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time.dt must be finite and > 0");
    if (points.empty()) throw ValidationError("points must name at least one point");
    for (const auto& p : points) {
        if (!atomic_valid(p.point.q1, p.point.p1)) {
            throw ValidationError("points: " + format_point(p) + " lies outside the Bloch disk (q1^2+p1^2 = " +
                                  detail::format_number(p.point.atomic_radius2()) + ", must be < 2)");
        }
    }
    detail::check_axis(section.q1, "section.q1");
    detail::check_axis(section.p1, "section.p1");
    detail::check_axis(husimi.q, "husimi.q");
    detail::check_axis(husimi.p, "husimi.p");
    for (double t : husimi_times) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("husimi.times must be finite and >= 0");
    }
    if (!(poincare.seed_q1_max >= poincare.seed_q1_min)) {
        throw ValidationError("poincare.seed_q1_max must be >= poincare.seed_q1_min");
    }
    if (!(poincare.tol > 0.0)) throw ValidationError("poincare.tol must be > 0");
    if (!(poincare.t_max > 0.0)) throw ValidationError("poincare.t_max must be > 0");
    if (convergence.n_list.empty()) throw ValidationError("convergence.n_list must not be empty");
    for (int n : convergence.n_list) {
        if (n < 1) throw ValidationError("convergence.n_list entries must be >= 1");
    }
    if (!(convergence.t_max >= 0.0)) throw ValidationError("convergence.t_max must be >= 0");
    if (out.empty()) throw ValidationError("out must not be empty");
}

namespace detail {

// One entry per key: how to read it into a RunConfig and how to print it back.
struct Field {
    std::function<void(RunConfig&, const std::string&, std::size_t)> read;
    std::function<std::string(const RunConfig&)> write;
    bool quoted{false};  // string-valued; serialize() wraps it in quotes
};

template <class Get>
Field number_at(Get get) {
    return {[=](RunConfig& c, const std::string& v, std::size_t l) { get(c) = parse_double(v, "", l); },
            [=](const RunConfig& c) { return format_number(get(c)); }};
}

template <class T, class Get>
Field integer_at(Get get, long long lo) {
    return {[=](RunConfig& c, const std::string& v, std::size_t l) {
                const long long n = parse_int(v, "", l);
                if (n < lo) throw ConfigError("must be >= " + std::to_string(lo) + " (got " + v + ")", l);
                get(c) = static_cast<T>(n);
            },
            [=](const RunConfig& c) { return std::to_string(get(c)); }};
}

template <class Get>
Field boolean_at(Get get) {
    return {[=](RunConfig& c, const std::string& v, std::size_t l) { get(c) = parse_bool(v, "", l); },
            [=](const RunConfig& c) { return std::string(get(c) ? "true" : "false"); }};
}

template <class Get>
void add_axis(std::vector<std::pair<std::string, Field>>& f, const std::string& prefix, Get get) {
    f.push_back({prefix + "_min", number_at([=](auto& c) -> auto& { return get(c).min; })});
    f.push_back({prefix + "_max", number_at([=](auto& c) -> auto& { return get(c).max; })});
    f.push_back({prefix + "_n", integer_at<int>([=](auto& c) -> auto& { return get(c).n; }, 1)});
}

inline const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> f;
        f.push_back({"model.omega", number_at([](auto& c) -> auto& { return c.params.omega; })});
        f.push_back({"model.omega0", number_at([](auto& c) -> auto& { return c.params.omega0; })});
        f.push_back({"model.g", number_at([](auto& c) -> auto& { return c.params.g; })});
        f.push_back({"shell.energy", number_at([](auto& c) -> auto& { return c.energy; })});
        f.push_back({"fock.n_max", integer_at<int>([](auto& c) -> auto& { return c.fock.n_max; }, 1)});
        f.push_back({"time.t_max", number_at([](auto& c) -> auto& { return c.t_max; })});
        f.push_back({"time.dt", number_at([](auto& c) -> auto& { return c.dt; })});
        f.push_back({"points", {[](RunConfig& c, const std::string& v, std::size_t l) { c.points = parse_points(v, l); },
                                [](const RunConfig& c) { return join(c.points, format_point); }, true}});
        add_axis(f, "section.q1", [](auto& c) -> auto& { return c.section.q1; });
        add_axis(f, "section.p1", [](auto& c) -> auto& { return c.section.p1; });
        add_axis(f, "husimi.q", [](auto& c) -> auto& { return c.husimi.q; });
        add_axis(f, "husimi.p", [](auto& c) -> auto& { return c.husimi.p; });
        f.push_back({"husimi.times",
                     {[](RunConfig& c, const std::string& v, std::size_t l) {
                          c.husimi_times.clear();
                          for (const auto& t : split(v, ';')) c.husimi_times.push_back(parse_double(t, "", l));
                      },
                      [](const RunConfig& c) { return join(c.husimi_times, format_number); }, true}});
        f.push_back({"poincare.seeds",
                     integer_at<std::size_t>([](auto& c) -> auto& { return c.poincare.seeds; }, 0)});
        f.push_back({"poincare.seed_q1_min", number_at([](auto& c) -> auto& { return c.poincare.seed_q1_min; })});
        f.push_back({"poincare.seed_q1_max", number_at([](auto& c) -> auto& { return c.poincare.seed_q1_max; })});
        f.push_back({"poincare.seed_p1", number_at([](auto& c) -> auto& { return c.poincare.seed_p1; })});
        f.push_back({"poincare.crossings",
                     integer_at<std::size_t>([](auto& c) -> auto& { return c.poincare.crossings; }, 1)});
        f.push_back({"poincare.tol", number_at([](auto& c) -> auto& { return c.poincare.tol; })});
        f.push_back({"poincare.t_max", number_at([](auto& c) -> auto& { return c.poincare.t_max; })});
        f.push_back({"poincare.include_points",
                     boolean_at([](auto& c) -> auto& { return c.poincare.include_points; })});
        f.push_back({"convergence.n_list",
                     {[](RunConfig& c, const std::string& v, std::size_t l) {
                          c.convergence.n_list.clear();
                          for (const auto& n : split(v, ';')) {
                              c.convergence.n_list.push_back(static_cast<int>(parse_int(n, "", l)));
                          }
                      },
                      [](const RunConfig& c) {
                          return join(c.convergence.n_list, [](int n) { return std::to_string(n); });
                      },
                      true}});
        f.push_back({"convergence.t_max", number_at([](auto& c) -> auto& { return c.convergence.t_max; })});
        f.push_back({"workers", integer_at<unsigned>([](auto& c) -> auto& { return c.workers; }, 0)});
        f.push_back({"out", {[](RunConfig& c, const std::string& v, std::size_t) { c.out = v; },
                             [](const RunConfig& c) { return c.out; }, true}});
        f.push_back({"pgm", boolean_at([](auto& c) -> auto& { return c.pgm; })});
        return f;
    }();
    return table;
}

} // namespace detail

// Parses without validating; parse_config below also validates.
inline RunConfig parse_config_unchecked(const std::string& text) {
    const auto& table = detail::fields();
    std::map<std::string, std::size_t> seen;
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string t = detail::trim(raw);
        if (t.empty() || t[0] == '#') continue;
        auto [key, value] = detail::split_line(t, line);
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
        if (it == table.end()) throw ConfigError("unknown key '" + key + "'", line);
        if (const auto [pos, fresh] = seen.emplace(key, line); !fresh) {
            throw ConfigError("key '" + key + "' already set on line " + std::to_string(pos->second), line);
        }
        try {
            it->second.read(cfg, value, line);
        } catch (const ConfigError& e) {
            // Field readers do not know their own key; prefix it here.
            std::string msg = e.what();
            const std::string tag = "line " + std::to_string(line) + ": ";
            if (msg.rfind(tag, 0) == 0) msg = msg.substr(tag.size());
            throw ConfigError(key + ": " + msg, line);
        }
    }
    return cfg;
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg = parse_config_unchecked(text);
    cfg.validate();
    return cfg;
}

inline std::string serialize(const RunConfig& cfg) {
    std::string s;
    for (const auto& [key, field] : detail::fields()) {
        const std::string v = field.write(cfg);
        s += key + " = " + (field.quoted ? detail::quote(v) : v) + "\n";
    }
    return s;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace rabi::io
