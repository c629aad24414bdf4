#include "memodiff/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "memodiff/errors.hpp"

namespace memodiff {

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;
using Tree = std::map<std::string, Section>;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"domain", {"length", "n_modes", "n_quad"}},
        {"epsilon", {"kind", "eps0", "kappa"}},
        {"kernel", {"kind", "amplitude", "delta", "file"}},
        {"nonlinearity", {"kind", "l", "p"}},
        {"forcing", {"modes"}},
        {"numerics",
         {"dt", "t_end", "sample_dt", "s_max", "s_segments", "tail_tol",
          "history_interp", "varrho", "history_bound", "initial", "ensemble_size",
          "pullback_levels", "pullback_spacing", "ball_radius", "sweep_param",
          "sweep_values"}},
    };
    return k;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

Tree parse_tree(const std::string& text) {
    Tree tree;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::size_t cut = raw.find_first_of("#;");
        std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated section header", line_no);
            section = trim(line.substr(1, line.size() - 2));
            if (known_keys().find(section) == known_keys().end())
                throw ParseError("unknown section [" + section + "]", line_no);
            tree[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value", line_no);
        if (section.empty())
            throw ParseError("key outside any section", line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        const std::set<std::string>& allowed = known_keys().at(section);
        if (allowed.find(key) == allowed.end())
            throw ParseError("unknown key '" + key + "' in [" + section + "]", line_no);
        if (tree[section].count(key))
            throw ParseError("duplicate key '" + key + "'", line_no);
        tree[section][key] = {value, line_no};
    }
    return tree;
}

// Typed getters; every conversion failure reports the config line.
class View {
  public:
    explicit View(const Tree& tree) : tree_(tree) {}

    bool has(const std::string& sec, const std::string& key) const {
        auto s = tree_.find(sec);
        return s != tree_.end() && s->second.count(key) > 0;
    }

    const Entry& entry(const std::string& sec, const std::string& key) const {
        return tree_.at(sec).at(key);
    }

    std::string str(const std::string& sec, const std::string& key,
                    const std::string& dflt) const {
        return has(sec, key) ? entry(sec, key).value : dflt;
    }

    double num(const std::string& sec, const std::string& key, double dflt) const {
        if (!has(sec, key)) return dflt;
        const Entry& e = entry(sec, key);
        return parse_double(e.value, e.line);
    }

    int integer(const std::string& sec, const std::string& key, int dflt) const {
        double v = num(sec, key, dflt);
        if (std::fabs(v - std::lround(v)) > 1e-9)
            throw ParseError("expected an integer for '" + key + "'",
                             has(sec, key) ? entry(sec, key).line : 0);
        return static_cast<int>(std::lround(v));
    }

    static double parse_double(const std::string& v, int line) {
        try {
            std::size_t pos = 0;
            double x = std::stod(v, &pos);
            while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos])))
                ++pos;
            if (pos != v.size()) throw std::invalid_argument("trailing");
            return x;
        } catch (const std::exception&) {
            throw ParseError("malformed number '" + v + "'", line);
        }
    }

  private:
    const Tree& tree_;
};

MemoryKernel kernel_from_file(const std::string& path, double declared_delta,
                              const SGrid& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open kernel file: " + path);
    std::vector<double> s, mu, dmu;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (line_no == 1 && t.find_first_not_of("smudcoef, \t") == std::string::npos)
            continue;  // header row
        std::replace(t.begin(), t.end(), ',', ' ');
        std::istringstream row(t);
        double a, b, c;
        if (!(row >> a >> b >> c))
            throw ParseError("kernel file: expected 's mu dmu'", line_no);
        s.push_back(a);
        mu.push_back(b);
        dmu.push_back(c);
    }
    if (static_cast<int>(s.size()) != grid.n_nodes())
        throw ConfigError("kernel file has " + std::to_string(s.size()) +
                          " rows; the s-grid has " + std::to_string(grid.n_nodes()) +
                          " nodes");
    for (int i = 0; i < grid.n_nodes(); ++i)
        if (std::fabs(s[static_cast<std::size_t>(i)] - grid.nodes[static_cast<std::size_t>(i)]) >
            1e-9 * std::max(1.0, grid.s_max))
            throw ConfigError("kernel file nodes do not match the s-grid at row " +
                              std::to_string(i + 1));
    return tabulated_kernel(std::move(mu), std::move(dmu), grid, declared_delta);
}

std::vector<std::pair<int, double>> parse_mode_pairs(const std::string& value,
                                                     int line) {
    std::vector<std::pair<int, double>> out;
    std::string t = value;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::string tok;
    while (in >> tok) {
        std::size_t colon = tok.find(':');
        if (colon == std::string::npos)
            throw ParseError("forcing modes: expected index:value, got '" + tok + "'",
                             line);
        int idx;
        try {
            std::size_t pos = 0;
            idx = std::stoi(tok.substr(0, colon), &pos);
            if (pos != colon) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("forcing modes: bad index in '" + tok + "'", line);
        }
        double val = View::parse_double(tok.substr(colon + 1), line);
        out.emplace_back(idx, val);
    }
    return out;
}

std::vector<double> parse_value_list(const std::string& value, int line) {
    std::string t = value;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream in(t);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(View::parse_double(tok, line));
    return out;
}

}  // namespace

LoadedConfig parse_config(const std::string& text) {
    Tree tree = parse_tree(text);
    View v(tree);
    LoadedConfig lc;
    ModelConfig& cfg = lc.model;

    double length = v.num("domain", "length", 3.14159265358979323846);
    int n_modes = v.integer("domain", "n_modes", 32);
    int n_quad = v.integer("domain", "n_quad", 128);
    cfg.basis = build_basis(length, n_modes, n_quad);

    double s_max = v.num("numerics", "s_max", 23.1);
    int s_segments = v.integer("numerics", "s_segments", 2310);
    cfg.grid = std::make_shared<const SGrid>(SGrid::uniform(s_max, s_segments));
    cfg.tail_tol = v.num("numerics", "tail_tol", 1e-10);

    std::string eps_kind = v.str("epsilon", "kind", "logistic");
    double eps0 = v.num("epsilon", "eps0", 1.0);
    if (eps_kind == "logistic") {
        cfg.eps = EpsilonSpec::logistic(eps0, v.num("epsilon", "kappa", 1.0));
    } else if (eps_kind == "constant") {
        if (v.has("epsilon", "kappa"))
            throw ParseError("constant epsilon takes no kappa",
                             v.entry("epsilon", "kappa").line);
        cfg.eps = EpsilonSpec::constant(eps0);
        lc.autonomous_mode = true;
    } else {
        throw ParseError("unknown epsilon kind '" + eps_kind + "'",
                         v.entry("epsilon", "kind").line);
    }

    std::string kern_kind = v.str("kernel", "kind", "exponential");
    if (kern_kind == "exponential") {
        cfg.kernel = MemoryKernel::exponential(v.num("kernel", "amplitude", 1.0),
                                               v.num("kernel", "delta", 1.0));
    } else if (kern_kind == "none") {
        cfg.kernel = MemoryKernel::zero();
    } else if (kern_kind == "tabulated") {
        if (!v.has("kernel", "file"))
            throw ConfigError("tabulated kernel needs a file");
        cfg.kernel = kernel_from_file(v.str("kernel", "file", ""),
                                      v.num("kernel", "delta", 1.0), *cfg.grid);
    } else {
        throw ParseError("unknown kernel kind '" + kern_kind + "'",
                         v.entry("kernel", "kind").line);
    }
    require_valid_kernel(cfg.kernel, *cfg.grid, cfg.tail_tol);

    std::string f_kind = v.str("nonlinearity", "kind", "cubic");
    double l = v.num("nonlinearity", "l", 1.0);
    if (f_kind == "cubic") {
        cfg.nonlin = NonlinearitySpec::cubic(l);
    } else if (f_kind == "odd_power") {
        cfg.nonlin = NonlinearitySpec::odd_power(v.num("nonlinearity", "p", 4.0), l);
    } else if (f_kind == "none") {
        cfg.nonlin = NonlinearitySpec::none();
    } else {
        throw ParseError("unknown nonlinearity kind '" + f_kind + "'",
                         v.entry("nonlinearity", "kind").line);
    }
    cfg.nonlin.validate();

    cfg.g = SpectralField(n_modes);
    if (v.has("forcing", "modes")) {
        const Entry& e = v.entry("forcing", "modes");
        for (auto [idx, val] : parse_mode_pairs(e.value, e.line)) {
            if (idx < 1 || idx > n_modes)
                throw ParseError("forcing mode " + std::to_string(idx) +
                                     " outside 1.." + std::to_string(n_modes),
                                 e.line);
            cfg.g[idx - 1] = val;
        }
    }

    cfg.dt = v.num("numerics", "dt", 1e-3);
    cfg.t_end = v.num("numerics", "t_end", 10.0);
    cfg.sample_dt = v.num("numerics", "sample_dt", 0.1);
    cfg.varrho = v.num("numerics", "varrho", 1.0);
    cfg.history_bound = v.num("numerics", "history_bound", 1e4);
    std::string interp = v.str("numerics", "history_interp", "cubic");
    if (interp == "cubic") {
        cfg.interp = InterpOrder::Cubic;
    } else if (interp == "linear") {
        cfg.interp = InterpOrder::Linear;
    } else {
        throw ParseError("unknown history_interp '" + interp + "'",
                         v.entry("numerics", "history_interp").line);
    }

    lc.initial = v.str("numerics", "initial", "default");
    if (lc.initial != "default" && lc.initial != "zero")
        throw ParseError("initial must be 'default' or 'zero'",
                         v.entry("numerics", "initial").line);
    lc.ensemble_size = v.integer("numerics", "ensemble_size", 6);
    lc.pullback_levels = v.integer("numerics", "pullback_levels", 5);
    lc.pullback_spacing = v.num("numerics", "pullback_spacing", 10.0);
    lc.ball_radius = v.num("numerics", "ball_radius", 10.0);
    lc.sweep_param = v.str("numerics", "sweep_param", "");
    if (v.has("numerics", "sweep_values")) {
        const Entry& e = v.entry("numerics", "sweep_values");
        lc.sweep_values = parse_value_list(e.value, e.line);
    }

    finalize_model(cfg);
    return lc;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string default_config_text() {
    return R"(# Canonical configuration; every constant explicit.

[domain]
length = 3.14159265358979323846
n_modes = 32
n_quad = 128

[epsilon]
kind = logistic
eps0 = 1.0
kappa = 1.0

[kernel]
kind = exponential
amplitude = 1.0
delta = 1.0

[nonlinearity]
kind = cubic
l = 1.0

[forcing]
modes = 1:1.0

[numerics]
dt = 0.001
t_end = 10.0
sample_dt = 0.1
s_max = 23.1
s_segments = 2310
tail_tol = 1e-10
history_interp = cubic
varrho = 1.0
history_bound = 10000
initial = default
ensemble_size = 6
pullback_levels = 5
pullback_spacing = 10.0
ball_radius = 10.0
)";
}

std::string config_echo(const LoadedConfig& lc) {
    const ModelConfig& cfg = lc.model;
    std::ostringstream os;
    os.precision(12);
    os << "domain: length " << cfg.basis.length << ", " << cfg.basis.n_modes
       << " modes, " << cfg.basis.n_quad << " quadrature nodes\n";
    os << "epsilon: "
       << (cfg.eps.kind == EpsilonSpec::Kind::Logistic ? "logistic" : "constant")
       << ", eps0 " << cfg.eps.eps0;
    if (cfg.eps.kind == EpsilonSpec::Kind::Logistic) os << ", kappa " << cfg.eps.kappa;
    os << ", L " << cfg.L << "\n";
    if (lc.autonomous_mode)
        os << "  note: constant epsilon (autonomous-comparison mode)\n";
    os << "kernel: ";
    if (cfg.kernel.is_zero())
        os << "none";
    else if (cfg.kernel.is_exponential())
        os << "exponential, amplitude " << cfg.kernel.amplitude << ", delta "
           << cfg.kernel.delta;
    else
        os << "tabulated, declared delta " << cfg.kernel.delta;
    os << "; rho " << cfg.rho << ", mass " << cfg.kernel.mass << "\n";
    os << "nonlinearity: ";
    switch (cfg.nonlin.kind) {
        case NonlinearitySpec::Kind::Cubic:
            os << "cubic, l " << cfg.nonlin.l;
            break;
        case NonlinearitySpec::Kind::OddPower:
            os << "odd_power, p " << cfg.nonlin.p << ", l " << cfg.nonlin.l;
            break;
        case NonlinearitySpec::Kind::None:
            os << "none";
            break;
    }
    os << "\n";
    os << "forcing: |g|^2 = " << cfg.g_norm_sq << "\n";
    os << "numerics: dt " << cfg.dt << ", t_end " << cfg.t_end << ", sample_dt "
       << cfg.sample_dt << ", s_max " << cfg.grid->s_max << " ("
       << cfg.grid->segments << " segments), "
       << (cfg.interp == InterpOrder::Cubic ? "cubic" : "linear")
       << " history interpolation\n";
    os << "derived: lambda_tilde " << cfg.lambda_tilde << ", L " << cfg.L
       << ", rho " << cfg.rho << ", alpha " << cfg.alpha << ", alpha_strong "
       << cfg.alpha_strong << "\n";
    return os.str();
}

}  // namespace memodiff
