#include "wavehf/shell/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wavehf/error.hpp"

namespace wavehf::shell {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "': " + what);
}

double get_number(const json& v, const std::string& field) {
    if (!v.is_number()) {
        fail(field, "expected a number");
    }
    return v.get<double>();
}

long get_integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) {
        fail(field, "expected an integer");
    }
    return v.get<long>();
}

bool get_bool(const json& v, const std::string& field) {
    if (!v.is_boolean()) {
        fail(field, "expected true or false");
    }
    return v.get<bool>();
}

std::string get_string(const json& v, const std::string& field) {
    if (!v.is_string()) {
        fail(field, "expected a string");
    }
    return v.get<std::string>();
}

Nuclei get_nuclei(const json& v) {
    if (!v.is_array()) {
        fail("nuclei", "expected an array of {\"position\": [...], \"charge\": Z}");
    }
    Nuclei out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const json& item = v[k];
        const std::string where = "nuclei[" + std::to_string(k) + "]";
        if (!item.is_object()) {
            fail(where, "expected an object");
        }
        Nucleus n;
        for (const auto& [key, value] : item.items()) {
            if (key == "position") {
                if (!value.is_array() || value.empty() || value.size() > 3) {
                    fail(where + ".position", "expected 1 to 3 coordinates");
                }
                for (std::size_t a = 0; a < value.size(); ++a) {
                    n.position[a] = get_number(value[a], where + ".position");
                }
            } else if (key == "charge") {
                n.charge = static_cast<int>(get_integer(value, where + ".charge"));
            } else {
                fail(where + "." + key, "unknown key");
            }
        }
        out.push_back(n);
    }
    return out;
}

void set_initial(RunConfig& c, const std::string& spec) {
    if (spec == "scf_projector") {
        c.initial = InitialKind::scf_projector;
    } else if (spec == "lowest_orbitals_projector") {
        c.initial = InitialKind::lowest_orbitals_projector;
    } else if (spec == "random_feasible") {
        c.initial = InitialKind::random_feasible;
    } else if (spec.rfind("file:", 0) == 0 && spec.size() > 5) {
        c.initial = InitialKind::file;
        c.initial_file = spec.substr(5);
    } else {
        fail("initial_state",
             "expected scf_projector, lowest_orbitals_projector, random_feasible or file:<path>, got '" + spec + "'");
    }
}

using Setter = std::function<void(RunConfig&, const json&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"dimension", [](RunConfig& c, const json& v) { c.dimension = static_cast<int>(get_integer(v, "dimension")); }},
        {"points_per_axis",
         [](RunConfig& c, const json& v) { c.points_per_axis = static_cast<int>(get_integer(v, "points_per_axis")); }},
        {"half_extent", [](RunConfig& c, const json& v) { c.half_extent = get_number(v, "half_extent"); }},
        {"softening", [](RunConfig& c, const json& v) { c.softening = get_number(v, "softening"); }},
        {"nuclei", [](RunConfig& c, const json& v) { c.nuclei = get_nuclei(v); }},
        {"electron_count",
         [](RunConfig& c, const json& v) { c.electron_count = static_cast<int>(get_integer(v, "electron_count")); }},
        {"initial_state", [](RunConfig& c, const json& v) { set_initial(c, get_string(v, "initial_state")); }},
        {"perturbation", [](RunConfig& c, const json& v) { c.perturbation = get_number(v, "perturbation"); }},
        {"seed",
         [](RunConfig& c, const json& v) {
             const long s = get_integer(v, "seed");
             if (s < 0) {
                 fail("seed", "must be nonnegative");
             }
             c.seed = static_cast<std::uint64_t>(s);
         }},
        {"coupling", [](RunConfig& c, const json& v) { c.coupling = get_bool(v, "coupling"); }},
        {"exchange", [](RunConfig& c, const json& v) { c.exchange = get_bool(v, "exchange"); }},
        {"scheme",
         [](RunConfig& c, const json& v) {
             const std::string s = get_string(v, "scheme");
             if (s == "duhamel") {
                 c.scheme = Scheme::duhamel;
             } else if (s == "rk4") {
                 c.scheme = Scheme::rk4;
             } else {
                 fail("scheme", "expected duhamel or rk4, got '" + s + "'");
             }
         }},
        {"dt", [](RunConfig& c, const json& v) { c.dt = get_number(v, "dt"); }},
        {"T", [](RunConfig& c, const json& v) { c.T = get_number(v, "T"); }},
        {"picard_tol", [](RunConfig& c, const json& v) { c.picard_tol = get_number(v, "picard_tol"); }},
        {"picard_max_iter",
         [](RunConfig& c, const json& v) { c.picard_max_iter = static_cast<int>(get_integer(v, "picard_max_iter")); }},
        {"record_stride", [](RunConfig& c, const json& v) { c.record_stride = get_integer(v, "record_stride"); }},
        {"csv_path", [](RunConfig& c, const json& v) { c.csv_path = get_string(v, "csv_path"); }},
        {"snapshot_dir", [](RunConfig& c, const json& v) { c.snapshot_dir = get_string(v, "snapshot_dir"); }},
        {"snapshot_stride", [](RunConfig& c, const json& v) { c.snapshot_stride = get_integer(v, "snapshot_stride"); }},
        {"fd_step", [](RunConfig& c, const json& v) { c.fd_step = get_number(v, "fd_step"); }},
        {"vn_time", [](RunConfig& c, const json& v) { c.vn_time = get_number(v, "vn_time"); }},
        {"scf_mixing", [](RunConfig& c, const json& v) { c.scf_mixing = get_number(v, "scf_mixing"); }},
        {"scf_max_iter",
         [](RunConfig& c, const json& v) { c.scf_max_iter = static_cast<int>(get_integer(v, "scf_max_iter")); }},
        {"min_max_iter",
         [](RunConfig& c, const json& v) { c.min_max_iter = static_cast<int>(get_integer(v, "min_max_iter")); }},
        {"min_grad_tol", [](RunConfig& c, const json& v) { c.min_grad_tol = get_number(v, "min_grad_tol"); }},
    };
    return table;
}

bool is_multiple(double T, double dt) {
    const double steps = std::round(T / dt);
    return std::abs(steps * dt - T) <= 1e-9 * std::max(T, dt);
}

}  // namespace

StepperConfig RunConfig::stepper() const {
    StepperConfig s;
    s.dt = dt;
    s.picard_tol = picard_tol;
    s.picard_max_iter = picard_max_iter;
    s.scheme = scheme;
    s.exchange = exchange;
    return s;
}

void RunConfig::validate() const {
    if (dimension < 1 || dimension > 3) {
        fail("dimension", "must be 1, 2 or 3");
    }
    if (points_per_axis < 8) {
        fail("points_per_axis", "must be at least 8");
    }
    if (!(half_extent > 0.0)) {
        fail("half_extent", "must be positive");
    }
    if (!(softening > 0.0)) {
        fail("softening", "must be positive");
    }
    for (std::size_t k = 0; k < nuclei.size(); ++k) {
        const Nucleus& n = nuclei[k];
        const std::string where = "nuclei[" + std::to_string(k) + "]";
        if (n.charge <= 0) {
            fail(where + ".charge", "must be positive");
        }
        for (int a = 0; a < 3; ++a) {
            if (a >= dimension && n.position[a] != 0.0) {
                fail(where + ".position", "has more coordinates than the grid dimension");
            }
            if (a < dimension && std::abs(n.position[a]) > half_extent) {
                fail(where + ".position", "lies outside the box");
            }
        }
    }
    const long ng = std::lround(std::pow(points_per_axis, dimension));
    const int n = electrons();
    if (n < 0 || n > ng) {
        fail("electron_count", "must lie in [0, n^d]");
    }
    if (!(perturbation >= 0.0)) {
        fail("perturbation", "must be nonnegative");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        fail("dt", "must be positive");
    }
    if (!(T > dt) || !std::isfinite(T)) {
        fail("T", "must be finite and larger than dt");
    }
    if (!is_multiple(T, dt)) {
        fail("T", "must be an integer multiple of dt");
    }
    if (!(picard_tol > 0.0)) {
        fail("picard_tol", "must be positive");
    }
    if (picard_max_iter < 1) {
        fail("picard_max_iter", "must be at least 1");
    }
    if (record_stride < 1) {
        fail("record_stride", "must be at least 1");
    }
    if (snapshot_stride < 0) {
        fail("snapshot_stride", "must be nonnegative");
    }
    if (snapshot_stride > 0 && snapshot_dir.empty()) {
        fail("snapshot_dir", "is required when snapshot_stride > 0");
    }
    if (!(fd_step >= 1e-7 && fd_step <= 1e-3)) {
        fail("fd_step", "must lie in [1e-7, 1e-3]");
    }
    // the residual fit runs with 2 dt, dt and dt/2
    if (!(vn_time >= 0.0) || !is_multiple(vn_time, 2 * dt)) {
        fail("vn_time", "must be a nonnegative multiple of 2 dt");
    }
    if (!(scf_mixing > 0.0 && scf_mixing <= 1.0)) {
        fail("scf_mixing", "must lie in (0, 1]");
    }
    if (scf_max_iter < 1) {
        fail("scf_max_iter", "must be at least 1");
    }
    if (min_max_iter < 1) {
        fail("min_max_iter", "must be at least 1");
    }
    if (!(min_grad_tol > 0.0)) {
        fail("min_grad_tol", "must be positive");
    }
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        // the message carries line and column
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    RunConfig c;
    const auto& table = setters();
    for (const auto& [key, value] : doc.items()) {
        const auto it = table.find(key);
        if (it == table.end()) {
            fail(key, "unknown key");
        }
        it->second(c, value);
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void apply_overrides(RunConfig& config, const Overrides& overrides) {
    if (overrides.dt) {
        config.dt = *overrides.dt;
    }
    if (overrides.T) {
        config.T = *overrides.T;
    }
    if (overrides.exchange) {
        config.exchange = true;
    }
    if (overrides.seed) {
        config.seed = *overrides.seed;
    }
}

}  // namespace wavehf::shell
