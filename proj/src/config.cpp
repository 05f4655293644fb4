#include "ringecho/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ringecho::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path.empty() ? what : path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            std::string known;
            for (const std::string& k : allowed) known += (known.empty() ? "" : ", ") + k;
            fail(path.empty() ? item.key() : path + "." + item.key(),
                 "unknown key (expected one of: " + known + ")");
        }
    }
}

double to_number(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_area(j.get<std::string>());
    fail(path, "expected a number or an area string like \"0.9pi\"");
}

int to_int(const json& j, const std::string& path) {
    if (j.is_number_integer()) return j.get<int>();
    if (j.is_number()) {
        const double v = j.get<double>();
        const int i = static_cast<int>(std::lround(v));
        if (std::abs(v - i) < 1e-9) return i;
    }
    fail(path, "expected an integer");
}

bool to_bool(const json& j, const std::string& path) {
    if (j.is_boolean()) return j.get<bool>();
    fail(path, "expected true or false");
}

std::string to_string_value(const json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    fail(path, "expected a string");
}

const json* section(const json& root, const std::string& name) {
    const auto it = root.find(name);
    if (it == root.end()) return nullptr;
    if (!it->is_object()) fail(name, "expected an object");
    return &*it;
}

// Dotted --set override: descend/create objects along the path, then store
// the value with a light type guess (bool, number, else raw string; strings
// with "pi" stay strings and go through parse_area at extraction).
void apply_override(json& root, const std::string& entry) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got \"" + entry + "\"");
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);

    json* node = &root;
    std::size_t begin = 0;
    while (true) {
        const std::size_t dot = key.find('.', begin);
        const std::string part = key.substr(begin, dot - begin);
        if (part.empty()) throw ConfigError("--set key has an empty segment: " + key);
        if (dot == std::string::npos) {
            json leaf;
            if (value == "true" || value == "false") {
                leaf = (value == "true");
            } else {
                try {
                    std::size_t used = 0;
                    const double v = std::stod(value, &used);
                    leaf = (used == value.size()) ? json(v) : json(value);
                } catch (const std::exception&) {
                    leaf = value;
                }
            }
            (*node)[part] = leaf;
            return;
        }
        if (!node->contains(part)) (*node)[part] = json::object();
        node = &(*node)[part];
        if (!node->is_object())
            throw ConfigError("--set " + key + ": " + part + " is not a section");
        begin = dot + 1;
    }
}

RunConfig extract(const json& root) {
    RunConfig out;
    check_keys(root, "",
               {"cavity", "pulses", "decoherence", "sweep", "oracle", "output"});

    if (const json* cavity = section(root, "cavity")) {
        check_keys(*cavity, "cavity", {"kappa", "kappa_in", "varkappa"});
        if (cavity->contains("kappa"))
            out.cavity.kappa = to_number((*cavity)["kappa"], "cavity.kappa");
        if (cavity->contains("kappa_in"))
            out.cavity.kappa_in = to_number((*cavity)["kappa_in"], "cavity.kappa_in");
        if (cavity->contains("varkappa"))
            out.cavity.varkappa = to_number((*cavity)["varkappa"], "cavity.varkappa");
    }

    if (const json* pulses = section(root, "pulses")) {
        check_keys(*pulses, "pulses", {"in_1", "in_2", "tau"});
        if (pulses->contains("in_1"))
            out.in_1 = to_number((*pulses)["in_1"], "pulses.in_1");
        if (pulses->contains("in_2"))
            out.in_2 = to_number((*pulses)["in_2"], "pulses.in_2");
        if (pulses->contains("tau")) {
            out.tau = to_number((*pulses)["tau"], "pulses.tau");
            if (!(out.tau > 0.0)) fail("pulses.tau", "must be > 0");
        }
    }

    if (const json* dec = section(root, "decoherence")) {
        check_keys(*dec, "decoherence", {"gamma", "gamma_factor"});
        if (dec->contains("gamma") && dec->contains("gamma_factor"))
            fail("decoherence", "gamma and gamma_factor are exclusive");
        if (dec->contains("gamma")) {
            out.gamma = to_number((*dec)["gamma"], "decoherence.gamma");
            if (out.gamma < 0.0) fail("decoherence.gamma", "must be >= 0");
        }
        if (dec->contains("gamma_factor")) {
            const double f = to_number((*dec)["gamma_factor"], "decoherence.gamma_factor");
            if (!(f > 0.0) || f > 1.0)
                fail("decoherence.gamma_factor", "must lie in (0, 1]");
            out.gamma_factor = f;
        }
    }

    if (const json* sweep = section(root, "sweep")) {
        check_keys(*sweep, "sweep", {"axis", "from", "to", "steps"});
        SweepSpec spec;
        if (!sweep->contains("axis")) fail("sweep.axis", "required");
        spec.axis = to_string_value((*sweep)["axis"], "sweep.axis");
        if (sweep->contains("from")) spec.from = to_number((*sweep)["from"], "sweep.from");
        if (sweep->contains("to")) spec.to = to_number((*sweep)["to"], "sweep.to");
        if (!sweep->contains("steps")) fail("sweep.steps", "required");
        spec.steps = to_int((*sweep)["steps"], "sweep.steps");
        if (spec.steps < 1) fail("sweep.steps", "must be >= 1");
        if (spec.from == spec.to) fail("sweep", "from and to must differ");
        out.sweep = spec;
    }

    if (const json* oracle = section(root, "oracle")) {
        check_keys(*oracle, "oracle",
                   {"delta_inh", "n_atoms", "span", "dt", "pulse_duration",
                    "pulse_shape", "t_first", "t_end", "store_every",
                    "window_width", "tolerances", "grid_convergence"});
        OracleSpec& spec = out.oracle;
        if (oracle->contains("delta_inh"))
            spec.delta_inh = to_number((*oracle)["delta_inh"], "oracle.delta_inh");
        if (oracle->contains("n_atoms"))
            spec.n_atoms = to_int((*oracle)["n_atoms"], "oracle.n_atoms");
        if (oracle->contains("span"))
            spec.span = to_number((*oracle)["span"], "oracle.span");
        if (oracle->contains("dt"))
            spec.dt = to_number((*oracle)["dt"], "oracle.dt");
        if (oracle->contains("pulse_duration"))
            spec.pulse_duration =
                to_number((*oracle)["pulse_duration"], "oracle.pulse_duration");
        if (oracle->contains("pulse_shape")) {
            const std::string shape =
                to_string_value((*oracle)["pulse_shape"], "oracle.pulse_shape");
            if (shape == "rectangular")
                spec.pulse_shape = mb::PulseShape::Rectangular;
            else if (shape == "gaussian")
                spec.pulse_shape = mb::PulseShape::Gaussian;
            else
                fail("oracle.pulse_shape", "expected \"rectangular\" or \"gaussian\"");
        }
        if (oracle->contains("t_first"))
            spec.t_first = to_number((*oracle)["t_first"], "oracle.t_first");
        if (oracle->contains("t_end"))
            spec.t_end = to_number((*oracle)["t_end"], "oracle.t_end");
        if (oracle->contains("store_every"))
            spec.store_every = to_int((*oracle)["store_every"], "oracle.store_every");
        if (oracle->contains("window_width"))
            spec.window_width =
                to_number((*oracle)["window_width"], "oracle.window_width");
        if (oracle->contains("tolerances")) {
            const json& tol = (*oracle)["tolerances"];
            if (!tol.is_object()) fail("oracle.tolerances", "expected an object");
            check_keys(tol, "oracle.tolerances", {"pulse", "echo", "empty"});
            if (tol.contains("pulse"))
                spec.tol_pulse = to_number(tol["pulse"], "oracle.tolerances.pulse");
            if (tol.contains("echo"))
                spec.tol_echo = to_number(tol["echo"], "oracle.tolerances.echo");
            if (tol.contains("empty"))
                spec.tol_empty = to_number(tol["empty"], "oracle.tolerances.empty");
        }
        if (oracle->contains("grid_convergence"))
            spec.grid_convergence =
                to_bool((*oracle)["grid_convergence"], "oracle.grid_convergence");
    }

    if (const json* output = section(root, "output")) {
        check_keys(*output, "output", {"path", "precision"});
        if (output->contains("path"))
            out.output.path = to_string_value((*output)["path"], "output.path");
        if (output->contains("precision")) {
            out.output.precision = to_int((*output)["precision"], "output.precision");
            if (out.output.precision < 1 || out.output.precision > 17)
                fail("output.precision", "must lie in [1, 17]");
        }
    }

    try {
        out.cavity.validate();
    } catch (const std::invalid_argument& e) {
        fail("cavity", e.what());
    }
    return out;
}

}  // namespace

double parse_area(const std::string& text) {
    static const std::regex number(
        R"(^\s*[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\s*$)");
    static const std::regex with_pi(
        R"(^\s*([+-])?\s*(\d+\.?\d*|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*|\.\d+))?\s*$)");
    if (std::regex_match(text, number)) return std::stod(text);
    std::smatch m;
    if (std::regex_match(text, m, with_pi)) {
        double value = std::numbers::pi;
        if (m[2].matched) value *= std::stod(m[2].str());
        if (m[3].matched) {
            const double div = std::stod(m[3].str());
            if (div == 0.0) throw ConfigError("area \"" + text + "\": division by zero");
            value /= div;
        }
        if (m[1].matched && m[1].str() == "-") value = -value;
        return value;
    }
    throw ConfigError("cannot parse area \"" + text +
                      "\" (expected a number or e.g. \"0.9pi\", \"pi/5\")");
}

double RunConfig::train_gamma_factor() const {
    if (gamma_factor) return *gamma_factor;
    return std::exp(-gamma * 2.0 * tau);
}

mb::MBSimConfig RunConfig::oracle_config() const {
    mb::MBSimConfig sim = mb::MBSimConfig::from_rates(cavity, oracle.delta_inh);
    sim.gamma = gamma_factor ? -std::log(*gamma_factor) / (2.0 * tau) : gamma;
    sim.grid.n_atoms = oracle.n_atoms;
    sim.grid.span = oracle.span;
    sim.dt = oracle.dt;
    sim.store_every = oracle.store_every;
    sim.pulses = {
        {oracle.t_first, oracle.pulse_duration, in_1, oracle.pulse_shape},
        {oracle.t_first + tau, oracle.pulse_duration, in_2, oracle.pulse_shape},
    };
    if (oracle.t_end > 0.0) {
        sim.t_end = oracle.t_end;
    } else {
        const double window =
            oracle.window_width > 0.0 ? oracle.window_width : 0.5 * tau;
        sim.t_end = oracle.t_first + 2.0 * tau + 0.5 * window +
                    30.0 / cavity.kappa_s();
    }
    return sim;
}

mb::VerifyTolerances RunConfig::oracle_tolerances() const {
    mb::VerifyTolerances tol;
    tol.pulse = oracle.tol_pulse;
    tol.echo = oracle.tol_echo;
    tol.empty = oracle.tol_empty;
    tol.window_width = oracle.window_width;
    tol.grid_convergence = oracle.grid_convergence;
    return tol;
}

RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides) {
    json root;
    try {
        root = json_text.empty() ? json::object() : json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    for (const std::string& entry : overrides) apply_override(root, entry);
    return extract(root);
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides) {
    if (path.empty() || path == "-") return parse_config("", overrides);
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), overrides);
}

}  // namespace ringecho::config
