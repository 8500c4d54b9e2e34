#include "infgeo/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "infgeo/errors.hpp"
#include "infgeo/geodesic.hpp"

namespace infgeo::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------
// Deterministic JSON rendering: fixed field order (driven by the call
// sites) and 17-significant-digit decimal floats.

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Shortest round-trip decimal, used for CSV cells.
std::string format_shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

class JsonWriter {
  public:
    void begin_object() { sep(); out_ += '{'; fresh_ = true; }
    void end_object() { out_ += '}'; fresh_ = false; }
    void begin_array() { sep(); out_ += '['; fresh_ = true; }
    void end_array() { out_ += ']'; fresh_ = false; }

    void key(const char* k) {
        sep();
        append_string(k);
        out_ += ':';
        fresh_ = true;
    }

    void value(double v) {
        sep();
        if (std::isfinite(v)) out_ += format_double(v);
        else out_ += "null";
    }
    void value(bool b) { sep(); out_ += b ? "true" : "false"; }
    void value(int v) { sep(); out_ += std::to_string(v); }
    void value(std::uint64_t v) { sep(); out_ += std::to_string(v); }
    void value(const std::string& s) { sep(); append_string(s.c_str()); }
    void null() { sep(); out_ += "null"; }

    void vector(const Vector& v) {
        begin_array();
        for (Index i = 0; i < v.size(); ++i) value(v[i]);
        end_array();
    }
    void matrix(const Matrix& m) {
        begin_array();
        for (Index i = 0; i < m.rows(); ++i) {
            begin_array();
            for (Index j = 0; j < m.cols(); ++j) value(m(i, j));
            end_array();
        }
        end_array();
    }

    std::string take() { return std::move(out_); }

  private:
    void sep() {
        if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[' &&
            out_.back() != ':')
            out_ += ',';
        fresh_ = false;
    }
    void append_string(const char* s) {
        out_ += '"';
        for (const char* c = s; *c; ++c) {
            switch (*c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                default: out_ += *c;
            }
        }
        out_ += '"';
    }

    std::string out_;
    bool fresh_ = true;
};

// ---------------------------------------------------------------------
// Custom generator catalog. Job specs cannot carry arbitrary functions,
// so custom manifolds name one of a small set of built-in generators.

std::shared_ptr<const Generator> make_catalog_generator(const std::string& psi, Index dim) {
    Generator::Options opts;
    opts.name = psi;
    if (psi == "quadratic") {
        opts.gradient = [](const Vector& x) { return x; };
        opts.hessian = [dim](const Vector&) { return Matrix::Identity(dim, dim).eval(); };
        return std::make_shared<Generator>(
            dim, [](const Vector& x) { return 0.5 * x.squaredNorm(); }, std::move(opts));
    }
    if (psi == "sum_exp") {
        opts.gradient = [](const Vector& x) { return x.array().exp().matrix().eval(); };
        opts.hessian = [dim](const Vector& x) {
            Matrix h = Matrix::Zero(dim, dim);
            for (Index i = 0; i < dim; ++i) h(i, i) = std::exp(x[i]);
            return h;
        };
        opts.dual_domain = [](const Vector& s) { return (s.array() > 0.0).all(); };
        return std::make_shared<Generator>(
            dim, [](const Vector& x) { return x.array().exp().sum(); }, std::move(opts));
    }
    if (psi == "softplus") {
        auto soft = [](double t) {
            return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        };
        auto sig = [](double t) {
            return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
        };
        opts.gradient = [sig](const Vector& x) {
            return x.unaryExpr([&](double t) { return sig(t); }).eval();
        };
        opts.hessian = [dim, sig](const Vector& x) {
            Matrix h = Matrix::Zero(dim, dim);
            for (Index i = 0; i < dim; ++i) {
                const double s = sig(x[i]);
                h(i, i) = s * (1.0 - s);
            }
            return h;
        };
        opts.dual_domain = [](const Vector& s) {
            return (s.array() > 0.0).all() && (s.array() < 1.0).all();
        };
        return std::make_shared<Generator>(
            dim,
            [soft](const Vector& x) {
                double total = 0.0;
                for (Index i = 0; i < x.size(); ++i) total += soft(x[i]);
                return total;
            },
            std::move(opts));
    }
    if (psi == "log_barrier") {
        opts.domain = [](const Vector& x) { return (x.array() > 0.0).all(); };
        opts.dual_domain = [](const Vector& s) { return (s.array() < 0.0).all(); };
        opts.gradient = [](const Vector& x) { return (-x.array().inverse()).matrix().eval(); };
        opts.hessian = [dim](const Vector& x) {
            Matrix h = Matrix::Zero(dim, dim);
            for (Index i = 0; i < dim; ++i) h(i, i) = 1.0 / (x[i] * x[i]);
            return h;
        };
        opts.reference_point = Vector::Ones(dim);
        return std::make_shared<Generator>(
            dim, [](const Vector& x) { return -x.array().log().sum(); }, std::move(opts));
    }
    if (psi == "neg_entropy") {
        opts.domain = [](const Vector& x) { return (x.array() > 0.0).all(); };
        opts.gradient = [](const Vector& x) { return x.array().log().matrix().eval(); };
        opts.hessian = [dim](const Vector& x) {
            Matrix h = Matrix::Zero(dim, dim);
            for (Index i = 0; i < dim; ++i) h(i, i) = 1.0 / x[i];
            return h;
        };
        opts.reference_point = Vector::Ones(dim);
        return std::make_shared<Generator>(
            dim,
            [](const Vector& x) { return (x.array() * x.array().log() - x.array()).sum(); },
            std::move(opts));
    }
    return nullptr;
}

const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {"log_barrier", "neg_entropy", "quadratic",
                                                   "softplus", "sum_exp"};
    return names;
}

// ---------------------------------------------------------------------
// Validation.

struct Validator {
    std::vector<ValidationIssue> issues;

    void add(const std::string& pointer, const std::string& message) {
        issues.push_back({pointer, message});
    }

    const json* object(const json& parent, const std::string& ptr, const char* key,
                       bool required) {
        if (!parent.contains(key)) {
            if (required) add(ptr + "/" + key, "missing required object");
            return nullptr;
        }
        if (!parent[key].is_object()) {
            add(ptr + "/" + key, "expected an object");
            return nullptr;
        }
        return &parent[key];
    }

    std::optional<std::string> string_field(const json& parent, const std::string& ptr,
                                            const char* key, bool required) {
        if (!parent.contains(key)) {
            if (required) add(ptr + "/" + key, "missing required string");
            return std::nullopt;
        }
        if (!parent[key].is_string()) {
            add(ptr + "/" + key, "expected a string");
            return std::nullopt;
        }
        return parent[key].get<std::string>();
    }

    std::optional<double> number_field(const json& parent, const std::string& ptr,
                                       const char* key, bool required) {
        if (!parent.contains(key)) {
            if (required) add(ptr + "/" + key, "missing required number");
            return std::nullopt;
        }
        if (!parent[key].is_number()) {
            add(ptr + "/" + key, "expected a number");
            return std::nullopt;
        }
        return parent[key].get<double>();
    }

    std::optional<Vector> vector_field(const json& parent, const std::string& ptr,
                                       const char* key, bool required, Index dim) {
        if (!parent.contains(key)) {
            if (required) add(ptr + "/" + key, "missing required array of numbers");
            return std::nullopt;
        }
        const json& arr = parent[key];
        if (!arr.is_array()) {
            add(ptr + "/" + key, "expected an array of numbers");
            return std::nullopt;
        }
        Vector v(arr.size());
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number()) {
                add(ptr + "/" + key, "expected an array of numbers");
                return std::nullopt;
            }
            v[static_cast<Index>(i)] = arr[i].get<double>();
        }
        if (dim >= 0 && v.size() != dim) {
            std::ostringstream os;
            os << "expected " << dim << " components, got " << v.size();
            add(ptr + "/" + key, os.str());
            return std::nullopt;
        }
        return v;
    }
};

std::optional<FamilyKind> parse_family_kind(const std::string& s) {
    if (s == "euclidean") return FamilyKind::euclidean;
    if (s == "bernoulli_product") return FamilyKind::bernoulli_product;
    if (s == "poisson_product") return FamilyKind::poisson_product;
    if (s == "gaussian_fixed_variance") return FamilyKind::gaussian_fixed_variance;
    if (s == "custom") return FamilyKind::custom;
    return std::nullopt;
}

std::string joined_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"divergence", "legendre", "metric",
                                                   "geodesic", "distance", "project", "check"};
    return names;
}

std::optional<Command> parse_command(const std::string& name) {
    if (name == "divergence") return Command::divergence;
    if (name == "legendre") return Command::legendre;
    if (name == "metric") return Command::metric;
    if (name == "geodesic") return Command::geodesic;
    if (name == "distance") return Command::distance;
    if (name == "project") return Command::project;
    if (name == "check") return Command::check;
    return std::nullopt;
}

std::variant<JobSpec, std::vector<ValidationIssue>> validate(const std::string& job_text) {
    Validator v;
    json root = json::parse(job_text, nullptr, false);
    if (root.is_discarded()) {
        v.add("", "not valid JSON");
        return v.issues;
    }
    if (!root.is_object()) {
        v.add("", "job spec must be a JSON object");
        return v.issues;
    }

    JobSpec job;

    // command
    if (auto cmd_name = v.string_field(root, "", "command", true)) {
        if (auto cmd = parse_command(*cmd_name)) {
            job.command = *cmd;
        } else {
            v.add("/command",
                  "unknown command '" + *cmd_name + "'; allowed: " + joined_names(command_names()));
        }
    }

    // manifold
    Index dim = -1;
    if (const json* manifold = v.object(root, "", "manifold", true)) {
        const std::string mptr = "/manifold";
        std::optional<FamilyKind> kind;
        if (auto kind_name = v.string_field(*manifold, mptr, "kind", true)) {
            kind = parse_family_kind(*kind_name);
            if (!kind)
                v.add(mptr + "/kind",
                      "unknown family kind '" + *kind_name +
                          "'; allowed: euclidean, bernoulli_product, poisson_product, "
                          "gaussian_fixed_variance, custom");
        }
        if (auto d = v.number_field(*manifold, mptr, "dim", true)) {
            if (*d < 1.0 || *d != std::floor(*d)) {
                v.add(mptr + "/dim", "dim must be a positive integer");
            } else {
                dim = static_cast<Index>(*d);
            }
        }
        if (kind && dim >= 1) {
            job.manifold.kind = *kind;
            job.manifold.dim = dim;
            if (*kind == FamilyKind::gaussian_fixed_variance) {
                if (auto var = v.number_field(*manifold, mptr, "variance", false)) {
                    if (*var <= 0.0) v.add(mptr + "/variance", "variance must be positive");
                    else job.manifold.variance = *var;
                }
            }
            if (*kind == FamilyKind::custom) {
                if (auto psi = v.string_field(*manifold, mptr, "psi", true)) {
                    job.manifold.custom_generator = make_catalog_generator(*psi, dim);
                    if (!job.manifold.custom_generator)
                        v.add(mptr + "/psi", "unknown generator '" + *psi +
                                                 "'; allowed: " + joined_names(catalog_names()));
                }
            }
        }
    }

    // output; geodesic results default to the CSV polyline format
    if (job.command == Command::geodesic) job.format = OutputFormat::csv;
    if (root.contains("output")) {
        if (const json* output = v.object(root, "", "output", false)) {
            if (auto path = v.string_field(*output, "/output", "path", false))
                job.out_path = *path;
            if (auto fmt = v.string_field(*output, "/output", "format", false)) {
                if (*fmt == "json") job.format = OutputFormat::json;
                else if (*fmt == "csv") job.format = OutputFormat::csv;
                else v.add("/output/format", "format must be 'json' or 'csv'");
            }
        }
    }

    if (job.format == OutputFormat::csv && job.command != Command::geodesic)
        v.add("/output/format", "csv output is only available for geodesic results");

    // arguments
    const json empty = json::object();
    const json* args = &empty;
    if (root.contains("arguments")) {
        if (const json* a = v.object(root, "", "arguments", false)) args = a;
    }
    const std::string aptr = "/arguments";
    JobArguments& ja = job.args;

    ja.tolerance = v.number_field(*args, aptr, "tolerance", false);
    if (ja.tolerance && *ja.tolerance <= 0.0)
        v.add(aptr + "/tolerance", "tolerance must be positive");
    ja.step = v.number_field(*args, aptr, "step", false);
    if (ja.step && *ja.step <= 0.0) v.add(aptr + "/step", "step must be positive");

    switch (job.command) {
        case Command::divergence:
        case Command::distance:
            ja.p = v.vector_field(*args, aptr, "p", true, dim);
            ja.q = v.vector_field(*args, aptr, "q", true, dim);
            break;
        case Command::legendre:
            ja.point = v.vector_field(*args, aptr, "point", true, dim);
            if (auto dir = v.string_field(*args, aptr, "direction", false)) {
                if (*dir != "to_dual" && *dir != "from_dual")
                    v.add(aptr + "/direction", "direction must be 'to_dual' or 'from_dual'");
                else
                    ja.legendre_direction = *dir;
            }
            break;
        case Command::metric:
            ja.point = v.vector_field(*args, aptr, "point", true, dim);
            break;
        case Command::geodesic: {
            ja.point = v.vector_field(*args, aptr, "point", true, dim);
            ja.velocity = v.vector_field(*args, aptr, "velocity", true, dim);
            ja.t_end = v.number_field(*args, aptr, "t_end", true);
            if (ja.t_end && *ja.t_end <= 0.0) v.add(aptr + "/t_end", "t_end must be positive");
            break;
        }
        case Command::project: {
            ja.point = v.vector_field(*args, aptr, "point", true, dim);
            if (auto variant = v.string_field(*args, aptr, "variant", false)) {
                if (*variant == "dual") ja.dual_projection = true;
                else if (*variant != "geodesic")
                    v.add(aptr + "/variant", "variant must be 'geodesic' or 'dual'");
            }
            const json* sub = v.object(*args, aptr, "submanifold", true);
            if (sub) {
                const std::string sptr = aptr + "/submanifold";
                SubmanifoldSpec spec;
                if (auto chart = v.string_field(*sub, sptr, "chart", true)) {
                    if (*chart == "primal") spec.chart = Chart::primal;
                    else if (*chart == "dual") spec.chart = Chart::dual;
                    else v.add(sptr + "/chart", "chart must be 'primal' or 'dual'");
                }
                auto offset = v.vector_field(*sub, sptr, "offset", true, dim);
                if (offset) spec.offset = *offset;

                if (!sub->contains("basis") || !(*sub)["basis"].is_array()) {
                    v.add(sptr + "/basis", "missing basis (array of rows)");
                } else {
                    const json& rows = (*sub)["basis"];
                    if (dim >= 0 && static_cast<Index>(rows.size()) != dim) {
                        std::ostringstream os;
                        os << "basis must have " << dim << " rows";
                        v.add(sptr + "/basis", os.str());
                    } else if (!rows.empty()) {
                        const std::size_t m = rows[0].is_array() ? rows[0].size() : 0;
                        Matrix basis(rows.size(), m);
                        bool ok = true;
                        for (std::size_t i = 0; i < rows.size() && ok; ++i) {
                            if (!rows[i].is_array() || rows[i].size() != m) {
                                v.add(sptr + "/basis", "basis rows must be equally sized arrays");
                                ok = false;
                                break;
                            }
                            for (std::size_t jcol = 0; jcol < m; ++jcol) {
                                if (!rows[i][jcol].is_number()) {
                                    v.add(sptr + "/basis", "basis entries must be numbers");
                                    ok = false;
                                    break;
                                }
                                basis(static_cast<Index>(i), static_cast<Index>(jcol)) =
                                    rows[i][jcol].get<double>();
                            }
                        }
                        if (ok) spec.basis = basis;
                    }
                }
                if (sub->contains("box")) {
                    if (const json* box = v.object(*sub, sptr, "box", false)) {
                        spec.box_lo = v.vector_field(*box, sptr + "/box", "lo", false, dim);
                        spec.box_hi = v.vector_field(*box, sptr + "/box", "hi", false, dim);
                    }
                }
                if (offset) {
                    if (spec.basis.size() == 0 && dim >= 0) spec.basis.resize(dim, 0);
                    try {
                        AffineSubmanifold probe(spec.chart, spec.offset, spec.basis,
                                                spec.box_lo, spec.box_hi);
                        ja.submanifold = spec;
                    } catch (const Error& e) {
                        v.add(sptr, e.what());
                    }
                }
            }
            break;
        }
        case Command::check: {
            if (auto seed = v.number_field(*args, aptr, "seed", false)) {
                if (*seed < 0.0 || *seed != std::floor(*seed))
                    v.add(aptr + "/seed", "seed must be a nonnegative integer");
                else
                    ja.seed = static_cast<std::uint64_t>(*seed);
            }
            if (auto samples = v.number_field(*args, aptr, "samples", false)) {
                if (*samples < 1.0 || *samples != std::floor(*samples))
                    v.add(aptr + "/samples", "samples must be a positive integer");
                else
                    ja.samples = static_cast<int>(*samples);
            }
            if (args->contains("suites")) {
                const json& suites = (*args)["suites"];
                if (!suites.is_array()) {
                    v.add(aptr + "/suites", "expected an array of suite names");
                } else {
                    const auto known = check_suite_names();
                    for (std::size_t i = 0; i < suites.size(); ++i) {
                        if (!suites[i].is_string()) {
                            v.add(aptr + "/suites", "suite names must be strings");
                            break;
                        }
                        const std::string name = suites[i].get<std::string>();
                        if (std::find(known.begin(), known.end(), name) == known.end()) {
                            v.add(aptr + "/suites/" + std::to_string(i),
                                  "unknown suite '" + name + "'");
                        } else {
                            ja.suites.push_back(name);
                        }
                    }
                }
            }
            break;
        }
    }

    if (!v.issues.empty()) return v.issues;
    return job;
}

namespace {

std::string render_geodesic_csv(const GeodesicSolution& sol) {
    std::string out = "t";
    const Index dimension = sol.points.empty() ? 0 : sol.points.front().size();
    for (Index i = 0; i < dimension; ++i) out += ",xi" + std::to_string(i);
    out += ",kinetic\n";
    for (std::size_t row = 0; row < sol.size(); ++row) {
        out += format_shortest(sol.times[row]);
        for (Index i = 0; i < dimension; ++i) out += "," + format_shortest(sol.points[row][i]);
        out += "," + format_shortest(sol.kinetic[row]);
        out += '\n';
    }
    return out;
}

std::string run_divergence(const JobSpec& job, const Generator& gen) {
    const PrimalCoords p(*job.args.p), q(*job.args.q);
    JsonWriter w;
    w.begin_object();
    w.key("value");
    w.value(bregman(gen, p, q));
    w.key("dual_value");
    w.value(dual_bregman(gen, p, q));
    w.key("mixed_value");
    w.value(mixed_bregman(gen, p, to_dual(gen, q)));
    w.end_object();
    return w.take();
}

std::string run_legendre(const JobSpec& job, const Generator& gen) {
    NewtonOptions nopts;
    if (job.args.tolerance) nopts.tolerance = *job.args.tolerance;
    Vector xi, xi_star;
    if (job.args.legendre_direction == "to_dual") {
        xi = *job.args.point;
        xi_star = to_dual(gen, PrimalCoords(xi)).xi_star;
    } else {
        xi_star = *job.args.point;
        xi = from_dual(gen, DualCoords(xi_star), nopts).xi;
    }
    JsonWriter w;
    w.begin_object();
    w.key("xi");
    w.vector(xi);
    w.key("xi_star");
    w.vector(xi_star);
    w.key("psi");
    w.value(gen.value(xi));
    w.key("psi_star");
    w.value(xi.dot(xi_star) - gen.value(xi));
    w.end_object();
    return w.take();
}

std::string run_metric(const JobSpec& job, const Generator& gen) {
    const PrimalCoords p(*job.args.point);
    const QuadraticForm form = induced_metric(gen, p);
    const MetricField field = MetricField::from_generator(gen);
    const ChristoffelSymbols gamma = christoffel(field, p);
    JsonWriter w;
    w.begin_object();
    w.key("point");
    w.vector(p.xi);
    w.key("fundamental");
    w.matrix(form.matrix);
    w.key("christoffel");
    w.begin_array();
    for (const Matrix& gk : gamma) w.matrix(gk);
    w.end_array();
    w.end_object();
    return w.take();
}

std::string run_geodesic(const JobSpec& job, const Generator& gen) {
    const MetricField field = MetricField::from_generator(gen);
    const double step = job.args.step.value_or(1e-3);
    const GeodesicSolution sol = geodesic_shoot(
        field, TangentVector{PrimalCoords(*job.args.point), *job.args.velocity},
        *job.args.t_end, step);
    if (job.format == OutputFormat::csv) return render_geodesic_csv(sol);

    JsonWriter w;
    w.begin_object();
    w.key("times");
    w.begin_array();
    for (double t : sol.times) w.value(t);
    w.end_array();
    w.key("points");
    w.begin_array();
    for (const Vector& x : sol.points) w.vector(x);
    w.end_array();
    w.key("velocities");
    w.begin_array();
    for (const Vector& x : sol.velocities) w.vector(x);
    w.end_array();
    w.key("kinetic");
    w.begin_array();
    for (double k : sol.kinetic) w.value(k);
    w.end_array();
    w.key("terminal");
    w.value(std::string(sol.terminal == TerminalStatus::completed ? "completed"
                                                                  : "left_domain"));
    w.end_object();
    return w.take();
}

std::string run_distance(const JobSpec& job, const Generator& gen) {
    const MetricField field = MetricField::from_generator(gen);
    ConnectOptions copts;
    if (job.args.step) copts.step = *job.args.step;
    if (job.args.tolerance) copts.tolerance = *job.args.tolerance;
    const double d =
        distance(field, PrimalCoords(*job.args.p), PrimalCoords(*job.args.q), copts);
    JsonWriter w;
    w.begin_object();
    w.key("reachable");
    w.value(std::isfinite(d));
    w.key("distance");
    if (std::isfinite(d)) w.value(d);
    else w.null();
    w.end_object();
    return w.take();
}

std::string run_project(const JobSpec& job, const Generator& gen) {
    const SubmanifoldSpec& s = *job.args.submanifold;
    const AffineSubmanifold sub(s.chart, s.offset, s.basis, s.box_lo, s.box_hi);
    ProjectionOptions popts;
    if (job.args.tolerance) popts.gradient_tolerance = *job.args.tolerance;
    const PrimalCoords p(*job.args.point);
    const ProjectionResult res =
        job.args.dual_projection ? dual_geodesic_projection(gen, p, sub, popts)
                                 : geodesic_projection(gen, p, sub, popts);

    // Probe triangle (P, Q, R) with R a nearby submanifold point; the
    // defect and residual of the probe certify the orthogonality of the
    // projection.
    PrimalCoords probe = res.point;
    if (sub.dim() > 0) {
        for (double delta = 0.1; delta > 1e-6; delta *= 0.5) {
            Vector u2 = res.u;
            u2[0] += delta;
            try {
                probe = sub.point(gen, u2);
                break;
            } catch (const Error&) {
            }
            u2[0] = res.u[0] - delta;
            try {
                probe = sub.point(gen, u2);
                break;
            } catch (const Error&) {
            }
        }
    }
    const Triangle tri{p, res.point, probe};
    const double defect = job.args.dual_projection ? dual_orthogonality_defect(gen, tri)
                                                   : orthogonality_defect(gen, tri);
    const double resid = job.args.dual_projection ? dual_pythagoras_residual(gen, tri)
                                                  : pythagoras_residual(gen, tri);

    JsonWriter w;
    w.begin_object();
    w.key("projected_point");
    w.vector(res.point.xi);
    w.key("u");
    w.vector(res.u);
    w.key("divergence");
    w.value(res.divergence);
    w.key("orthogonality_defect");
    w.value(defect);
    w.key("pythagoras_residual");
    w.value(resid);
    w.key("near_singular");
    w.value(res.near_singular);
    w.end_object();
    return w.take();
}

std::string run_check(const JobSpec& job, bool& all_passed) {
    CheckOptions copts;
    if (job.args.seed) copts.seed = *job.args.seed;
    if (job.args.samples) copts.samples = *job.args.samples;
    copts.suites = job.args.suites;
    const std::vector<SuiteResult> results = run_check_suites(job.manifold, copts);

    all_passed = true;
    JsonWriter w;
    w.begin_object();
    w.key("family");
    w.value(std::string(family_kind_name(job.manifold.kind)));
    w.key("seed");
    w.value(static_cast<std::uint64_t>(copts.seed));
    w.key("suites");
    w.begin_array();
    for (const SuiteResult& r : results) {
        if (!r.passed) all_passed = false;
        w.begin_object();
        w.key("name");
        w.value(r.name);
        w.key("passed");
        w.value(r.passed);
        w.key("skipped");
        w.value(r.skipped);
        w.key("max_residual");
        w.value(r.max_residual);
        w.key("tolerance");
        w.value(r.tolerance);
        w.key("samples");
        w.value(r.samples);
        w.key("note");
        w.value(r.note);
        w.end_object();
    }
    w.end_array();
    w.key("all_passed");
    w.value(all_passed);
    w.end_object();
    return w.take();
}

}  // namespace

RunResult run(const JobSpec& job) {
    RunResult result;
    try {
        job.manifold.validate();
        const Generator gen = log_partition(job.manifold);
        switch (job.command) {
            case Command::divergence: result.document = run_divergence(job, gen); break;
            case Command::legendre: result.document = run_legendre(job, gen); break;
            case Command::metric: result.document = run_metric(job, gen); break;
            case Command::geodesic: result.document = run_geodesic(job, gen); break;
            case Command::distance: result.document = run_distance(job, gen); break;
            case Command::project: result.document = run_project(job, gen); break;
            case Command::check: {
                bool all_passed = true;
                result.document = run_check(job, all_passed);
                if (!all_passed) {
                    result.exit_code = 3;
                    result.error_message = "one or more invariant suites failed";
                }
                break;
            }
        }
    } catch (const ValidationError& e) {
        result.exit_code = 2;
        result.error_message = e.what();
    } catch (const Error& e) {
        result.exit_code = 3;
        result.error_message = e.what();
    }
    return result;
}

std::vector<ValidationIssue> validate_result_document(Command command,
                                                      const std::string& document) {
    std::vector<ValidationIssue> issues;

    if (command == Command::geodesic && !document.empty() && document[0] == 't') {
        // CSV polyline: header then uniform numeric rows.
        std::istringstream in(document);
        std::string line;
        std::getline(in, line);
        if (line.rfind("t,", 0) != 0 || line.find("kinetic") == std::string::npos) {
            issues.push_back({"", "csv header must be t,xi...,kinetic"});
            return issues;
        }
        const auto columns = std::count(line.begin(), line.end(), ',') + 1;
        int row = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ++row;
            if (std::count(line.begin(), line.end(), ',') + 1 != columns)
                issues.push_back({"/row/" + std::to_string(row), "ragged csv row"});
        }
        if (row == 0) issues.push_back({"", "csv polyline has no rows"});
        return issues;
    }

    json doc = json::parse(document, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        issues.push_back({"", "result document is not a JSON object"});
        return issues;
    }
    auto need = [&](const char* key, const char* type) {
        if (!doc.contains(key)) {
            issues.push_back({std::string("/") + key, "missing"});
            return;
        }
        const json& v2 = doc[key];
        const std::string t = type;
        const bool ok = (t == "number" && v2.is_number()) ||
                        (t == "array" && v2.is_array()) ||
                        (t == "bool" && v2.is_boolean()) ||
                        (t == "number_or_null" && (v2.is_number() || v2.is_null())) ||
                        (t == "string" && v2.is_string());
        if (!ok) issues.push_back({std::string("/") + key, std::string("expected ") + type});
    };

    switch (command) {
        case Command::divergence:
            need("value", "number");
            need("dual_value", "number");
            need("mixed_value", "number");
            break;
        case Command::legendre:
            need("xi", "array");
            need("xi_star", "array");
            need("psi", "number");
            need("psi_star", "number");
            break;
        case Command::metric:
            need("point", "array");
            need("fundamental", "array");
            need("christoffel", "array");
            break;
        case Command::geodesic:
            need("times", "array");
            need("points", "array");
            need("velocities", "array");
            need("kinetic", "array");
            need("terminal", "string");
            break;
        case Command::distance:
            need("reachable", "bool");
            need("distance", "number_or_null");
            break;
        case Command::project:
            need("projected_point", "array");
            need("u", "array");
            need("divergence", "number");
            need("orthogonality_defect", "number");
            need("pythagoras_residual", "number");
            need("near_singular", "bool");
            break;
        case Command::check:
            need("family", "string");
            need("seed", "number");
            need("suites", "array");
            need("all_passed", "bool");
            break;
    }
    return issues;
}

}  // namespace infgeo::cli
