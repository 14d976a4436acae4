#include "twowell/runconfig.hpp"

#include "twowell/errors.hpp"
#include "twowell/io.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

namespace twowell {

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> cmds = {
        "wells",   "energy",  "minimize",        "layer",   "scaling",
        "surface-scaling", "spin", "coarea",     "rigidity", "perturb-grid",
        "verify",  "calibrate", "export"};
    return cmds;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct Field {
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    return x;
}

long parse_long(const std::string& key, const std::string& v) {
    char* end = nullptr;
    long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return x;
}

} // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    if (const char* env = std::getenv("TWOWELL_OUT")) cfg.out = env;

    std::map<std::string, Field> fields;
    std::map<std::string, std::string> provenance;

    auto num = [&](const std::string& key, double* slot) {
        fields[key] = {[key, slot](const std::string& v) { *slot = parse_double(key, v); },
                       [slot] { return fmt_g17(*slot); }};
    };
    auto integer = [&](const std::string& key, auto* slot) {
        fields[key] = {[key, slot](const std::string& v) {
                           *slot = static_cast<std::remove_pointer_t<decltype(slot)>>(
                               parse_long(key, v));
                       },
                       [slot] { return std::to_string(*slot); }};
    };
    auto text = [&](const std::string& key, std::string* slot) {
        fields[key] = {[slot](const std::string& v) { *slot = v; }, [slot] { return *slot; }};
    };
    auto num_list = [&](const std::string& key, std::vector<double>* slot) {
        fields[key] = {[key, slot](const std::string& v) {
                           slot->clear();
                           for (const std::string& p : split(v, ','))
                               slot->push_back(parse_double(key, trim(p)));
                       },
                       [slot] {
                           std::string s;
                           for (size_t k = 0; k < slot->size(); ++k)
                               s += (k ? "," : "") + fmt_g17((*slot)[k]);
                           return s;
                       }};
    };
    auto int_list = [&](const std::string& key, std::vector<int>* slot) {
        fields[key] = {[key, slot](const std::string& v) {
                           slot->clear();
                           for (const std::string& p : split(v, ','))
                               slot->push_back(int(parse_long(key, trim(p))));
                       },
                       [slot] {
                           std::string s;
                           for (size_t k = 0; k < slot->size(); ++k)
                               s += (k ? "," : "") + std::to_string((*slot)[k]);
                           return s;
                       }};
    };

    text("out", &cfg.out);
    text("fixtures", &cfg.fixtures);
    num("a", &cfg.a);
    num("lambda", &cfg.lambda);
    integer("n", &cfg.n);
    int_list("n_list", &cfg.n_list);
    num("d", &cfg.d);
    num("l", &cfg.l);
    integer("sign", &cfg.sign);
    text("density", &cfg.density);
    text("input", &cfg.input);
    text("init", &cfg.init);
    text("init_f", &cfg.init_f);
    num_list("interfaces", &cfg.interfaces);
    integer("lamsign", &cfg.lamsign);
    num("amplitude", &cfg.amplitude);
    integer("seed", &cfg.seed);
    integer("seeds", &cfg.seeds);
    integer("restarts", &cfg.restarts);
    integer("max_iters", &cfg.max_iters);
    num("grad_tol", &cfg.grad_tol);
    num("step0", &cfg.step0);
    text("method", &cfg.method);
    num("m1", &cfg.m1);
    num("m2", &cfg.m2);
    num_list("m1_list", &cfg.m1_list);
    num_list("m2_list", &cfg.m2_list);
    text("kind", &cfg.kind);
    num("theta", &cfg.theta);
    integer("chain_length", &cfg.chain_length);
    integer("resolution", &cfg.resolution);
    text("mode", &cfg.mode);
    num_list("x0", &cfg.x0);
    num_list("y0", &cfg.y0);
    num("alpha", &cfg.alpha);
    integer("samples", &cfg.samples);
    num("tol", &cfg.tol);
    integer("layers", &cfg.layers);

    auto assign = [&](const std::string& key, const std::string& value, const std::string& src) {
        auto it = fields.find(key);
        if (it == fields.end()) throw ConfigError("unknown key '" + key + "'");
        it->second.set(value);
        provenance[key] = src;
    };

    // collect flags, extract command and config file
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> flag_pairs;
    for (size_t k = 0; k < args.size(); ++k) {
        const std::string& tok = args[k];
        if (tok.rfind("--", 0) == 0) {
            std::string key = tok.substr(2), value;
            size_t eq = key.find('=');
            if (eq != std::string::npos) {
                value = key.substr(eq + 1);
                key = key.substr(0, eq);
            } else {
                if (k + 1 >= args.size())
                    throw ConfigError("flag --" + key + " is missing a value");
                value = args[++k];
            }
            if (key == "config")
                config_path = value;
            else if (key == "command")
                cfg.command = value;
            else
                flag_pairs.push_back({key, value});
        } else if (cfg.command.empty()) {
            cfg.command = tok;
        } else {
            throw ConfigError("unexpected positional argument '" + tok + "'");
        }
    }

    if (!config_path.empty()) {
        std::istringstream is(read_text_file(config_path));
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
            std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
            if (key == "command") {
                if (cfg.command.empty()) cfg.command = value;
            } else {
                assign(key, value, "file");
            }
        }
    }
    for (const auto& [key, value] : flag_pairs) assign(key, value, "flag");

    // validation, naming the violated bound
    if (cfg.command.empty()) throw ConfigError("no command given");
    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), cfg.command) == cmds.end())
        throw ConfigError("unknown command '" + cfg.command + "'");
    if (!(cfg.a > 0.0)) throw ConfigError("a must satisfy a > 0");
    if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) throw ConfigError("lambda must lie in (0,1]");
    if (cfg.n < 2) throw ConfigError("n must satisfy n >= 2");
    if (!(cfg.d > 0.0 && cfg.l > 0.0)) throw ConfigError("d and l must be positive");
    if (cfg.sign != 1 && cfg.sign != -1) throw ConfigError("sign must be 1 or -1");
    if (cfg.lamsign != 1 && cfg.lamsign != -1) throw ConfigError("lamsign must be 1 or -1");
    if (cfg.density != "tilde" && cfg.density != "truncated" && cfg.density != "one_well")
        throw ConfigError("density must be one of tilde|truncated|one_well");
    if (cfg.method != "qn" && cfg.method != "gd") throw ConfigError("method must be qn or gd");
    if (!(cfg.theta >= 0.0 && cfg.theta < 1.0)) throw ConfigError("theta must lie in [0,1)");
    if (cfg.mode != "worst" && cfg.mode != "uniform")
        throw ConfigError("mode must be worst or uniform");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 0.125)) throw ConfigError("alpha must lie in (0,1/8)");
    if (cfg.samples < 1) throw ConfigError("samples must be positive");
    if (cfg.restarts < 1) throw ConfigError("restarts must be positive");
    if (cfg.x0.size() != 2 || cfg.y0.size() != 2)
        throw ConfigError("x0 and y0 must be comma pairs");

    // echoed config with provenance per field
    cfg.echo["command"] = {{"value", cfg.command}, {"source", "flag"}};
    for (const auto& [key, field] : fields) {
        std::string src = provenance.count(key) ? provenance[key] : "default";
        cfg.echo[key] = {{"value", field.get()}, {"source", src}};
    }
    return cfg;
}

} // namespace twowell
