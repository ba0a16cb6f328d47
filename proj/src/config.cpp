#include "mblcoh/config.hpp"

#include "mblcoh/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>

namespace mblcoh {

namespace {

struct Value;
using Scalar = std::variant<std::int64_t, double, std::string, bool>;

struct Value {
    bool is_array = false;
    std::vector<Scalar> items; // one item when scalar
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if(b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string strip_comment(std::string_view line) {
    std::string out;
    bool quoted = false;
    for(char c : line) {
        if(c == '"') quoted = !quoted;
        if(c == '#' && !quoted) break;
        out.push_back(c);
    }
    return out;
}

Scalar parse_scalar(std::string_view s, const std::string& key, int line_no) {
    s = trim(s);
    auto fail = [&](const std::string& why) -> ConfigError {
        return ConfigError("line " + std::to_string(line_no) + ", key '" + key + "': " + why);
    };
    if(s.empty()) throw fail("missing value");
    if(s.front() == '"') {
        if(s.size() < 2 || s.back() != '"') throw fail("unterminated string");
        return std::string(s.substr(1, s.size() - 2));
    }
    if(s == "true") return true;
    if(s == "false") return false;
    const bool looks_float = s.find_first_of(".eE") != std::string_view::npos || s == "inf" || s == "nan";
    if(!looks_float) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if(ec == std::errc() && p == s.data() + s.size()) return v;
    }
    double d = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
    if(ec == std::errc() && p == s.data() + s.size()) return d;
    throw fail("cannot parse value '" + std::string(s) + "'");
}

Value parse_value(std::string_view s, const std::string& key, int line_no) {
    s = trim(s);
    Value v;
    if(!s.empty() && s.front() == '[') {
        if(s.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ", key '" + key + "': unterminated array");
        v.is_array = true;
        const std::string_view inner = trim(s.substr(1, s.size() - 2));
        if(inner.empty()) return v;
        std::size_t pos = 0;
        while(pos <= inner.size()) {
            // Commas never appear inside the scalar types we accept, except within strings.
            std::size_t end = pos;
            bool quoted = false;
            while(end < inner.size() && (quoted || inner[end] != ',')) {
                if(inner[end] == '"') quoted = !quoted;
                ++end;
            }
            v.items.push_back(parse_scalar(inner.substr(pos, end - pos), key, line_no));
            pos = end + 1;
        }
        return v;
    }
    v.items.push_back(parse_scalar(s, key, line_no));
    return v;
}

class Reader {
  public:
    explicit Reader(std::map<std::string, Value> values) : values_(std::move(values)) {}

    [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

    double number(const std::string& key, const Scalar& s) const {
        if(const auto* i = std::get_if<std::int64_t>(&s)) return static_cast<double>(*i);
        if(const auto* d = std::get_if<double>(&s)) return *d;
        throw type_error(key, "number");
    }
    std::int64_t integer(const std::string& key, const Scalar& s) const {
        if(const auto* i = std::get_if<std::int64_t>(&s)) return *i;
        throw type_error(key, "integer");
    }
    std::string string(const std::string& key, const Scalar& s) const {
        if(const auto* str = std::get_if<std::string>(&s)) return *str;
        throw type_error(key, "string");
    }

    const Scalar& scalar(const std::string& key, const std::string& expected) const {
        const auto& v = values_.at(key);
        if(v.is_array || v.items.size() != 1) throw type_error(key, expected);
        return v.items.front();
    }
    // Accepts either a scalar or an array.
    std::vector<Scalar> list(const std::string& key) const {
        const auto& v = values_.at(key);
        return v.items;
    }

    ConfigError type_error(const std::string& key, const std::string& expected) const {
        return ConfigError("key '" + key + "': expected " + expected);
    }

  private:
    std::map<std::string, Value> values_;
};

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{"N",       "J",        "delta",  "dh",     "R",     "seed",  "boundary", "initial", "n_list",
                                               "measures", "log_base", "engine", "t_min", "t_max", "t_points", "include_t0"};
    return keys;
}

} // namespace

ExperimentConfig parse_config_text(std::string_view text) {
    std::map<std::string, Value> values;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while(std::getline(in, raw)) {
        ++line_no;
        const std::string line = strip_comment(raw);
        const std::string_view body = trim(line);
        if(body.empty()) continue;
        if(body.front() == '[') throw ConfigError("line " + std::to_string(line_no) + ": tables are not supported; use flat keys");
        const auto eq = body.find('=');
        if(eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(trim(body.substr(0, eq)));
        if(std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if(values.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' given twice");
        values.emplace(key, parse_value(body.substr(eq + 1), key, line_no));
    }

    const Reader rd(std::move(values));
    for(const char* required : {"N", "delta", "dh", "R"})
        if(!rd.has(required)) throw ConfigError(std::string("key '") + required + "': required key is missing");

    ExperimentConfig c;
    for(const auto& s : rd.list("N")) c.N_list.push_back(static_cast<int>(rd.integer("N", s)));
    for(const auto& s : rd.list("delta")) c.delta_list.push_back(rd.number("delta", s));
    for(const auto& s : rd.list("dh")) c.dh_list.push_back(rd.number("dh", s));
    c.realizations = static_cast<int>(rd.integer("R", rd.scalar("R", "integer")));
    if(rd.has("J")) c.J = rd.number("J", rd.scalar("J", "number"));
    if(rd.has("seed")) {
        const auto seed = rd.integer("seed", rd.scalar("seed", "non-negative integer"));
        if(seed < 0) throw rd.type_error("seed", "non-negative integer");
        c.master_seed = static_cast<std::uint64_t>(seed);
    }
    if(rd.has("boundary")) c.boundary = parse_boundary(rd.string("boundary", rd.scalar("boundary", "string")));
    if(rd.has("initial")) c.initial = parse_initial_state(rd.string("initial", rd.scalar("initial", "string")));
    if(rd.has("engine")) c.engine = parse_engine(rd.string("engine", rd.scalar("engine", "string")));
    if(rd.has("log_base")) {
        const auto& s = rd.scalar("log_base", "\"e\" or \"2\"");
        if(const auto* i = std::get_if<std::int64_t>(&s))
            c.log_base = parse_log_base(std::to_string(*i));
        else
            c.log_base = parse_log_base(rd.string("log_base", s));
    }
    if(rd.has("measures")) {
        c.measures.clear();
        for(const auto& s : rd.list("measures")) c.measures.push_back(parse_measure(rd.string("measures", s)));
    }
    if(rd.has("n_list")) {
        c.n_list.clear();
        for(const auto& s : rd.list("n_list")) {
            if(const auto* str = std::get_if<std::string>(&s)) {
                if(*str != "N") throw rd.type_error("n_list", "integers or \"N\"");
                c.n_list.push_back({0, true});
            } else {
                c.n_list.push_back({static_cast<int>(rd.integer("n_list", s)), false});
            }
        }
    }
    if(rd.has("t_min")) c.grid.t_min = rd.number("t_min", rd.scalar("t_min", "number"));
    if(rd.has("t_max")) c.grid.t_max = rd.number("t_max", rd.scalar("t_max", "number"));
    if(rd.has("t_points")) c.grid.points = static_cast<int>(rd.integer("t_points", rd.scalar("t_points", "integer")));
    if(rd.has("include_t0")) {
        const auto& s = rd.scalar("include_t0", "boolean");
        const auto* b = std::get_if<bool>(&s);
        if(!b) throw rd.type_error("include_t0", "boolean");
        c.grid.include_zero = *b;
    }
    c.validate();
    return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if(!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["N"] = c.N_list;
    j["J"] = c.J;
    j["delta"] = c.delta_list;
    j["dh"] = c.dh_list;
    j["R"] = c.realizations;
    j["seed"] = c.master_seed;
    j["boundary"] = std::string(to_string(c.boundary));
    j["initial"] = std::string(to_string(c.initial));
    j["engine"] = std::string(to_string(c.engine));
    j["log_base"] = std::string(to_string(c.log_base));
    nlohmann::json n_list = nlohmann::json::array();
    for(const auto& s : c.n_list) {
        if(s.whole_system)
            n_list.push_back("N");
        else
            n_list.push_back(s.n);
    }
    j["n_list"] = n_list;
    nlohmann::json measures = nlohmann::json::array();
    for(auto m : c.measures) measures.push_back(std::string(to_string(m)));
    j["measures"] = measures;
    j["t_min"] = c.grid.t_min;
    j["t_max"] = c.grid.t_max;
    j["t_points"] = c.grid.points;
    j["include_t0"] = c.grid.include_zero;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    try {
        ExperimentConfig c;
        c.N_list = j.at("N").get<std::vector<int>>();
        c.J = j.at("J").get<double>();
        c.delta_list = j.at("delta").get<std::vector<double>>();
        c.dh_list = j.at("dh").get<std::vector<double>>();
        c.realizations = j.at("R").get<int>();
        c.master_seed = j.at("seed").get<std::uint64_t>();
        c.boundary = parse_boundary(j.at("boundary").get<std::string>());
        c.initial = parse_initial_state(j.at("initial").get<std::string>());
        c.engine = parse_engine(j.at("engine").get<std::string>());
        c.log_base = parse_log_base(j.at("log_base").get<std::string>());
        c.n_list.clear();
        for(const auto& v : j.at("n_list")) {
            if(v.is_string())
                c.n_list.push_back({0, true});
            else
                c.n_list.push_back({v.get<int>(), false});
        }
        c.measures.clear();
        for(const auto& v : j.at("measures")) c.measures.push_back(parse_measure(v.get<std::string>()));
        c.grid.t_min = j.at("t_min").get<double>();
        c.grid.t_max = j.at("t_max").get<double>();
        c.grid.points = j.at("t_points").get<int>();
        c.grid.include_zero = j.at("include_t0").get<bool>();
        return c;
    } catch(const nlohmann::json::exception& e) {
        throw ConfigError(std::string("metadata config echo is malformed: ") + e.what());
    }
}

} // namespace mblcoh
