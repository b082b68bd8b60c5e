#include "klab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "klab/error.hpp"

namespace klab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundValue capped(double raw) { return {raw, std::min(1.0, raw)}; }

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::DomainError, what);
}

double asinh_log(double z) { return std::log(z + std::sqrt(z * z + 1.0)); }

double integrate(const std::function<double(double)>& f, double lo, double hi) {
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
}

}  // namespace

BoundValue prokhorov(double x, double y, double var_sum) {
    require(x > 0.0 && y > 0.0 && var_sum > 0.0, "prokhorov needs x, y, B_n > 0");
    return capped(std::exp(-(x / (2.0 * y)) * asinh_log(x * y / (2.0 * var_sum))));
}

BoundValue nagaev_sv(double x, double y, double p, double m_p, double tail_at_y) {
    require(x > 0.0 && y > 0.0 && p > 0.0, "nagaev needs x, y, p > 0");
    require(m_p >= 0.0 && tail_at_y >= 0.0, "nagaev needs m_p, tail >= 0");
    const double base = std::exp(1.0) * m_p / (x * std::pow(y, p - 1.0));
    return capped(tail_at_y + std::pow(base, x / y));
}

BoundValue fuk_nagaev(double x, double y, double p, double m_p, double var_sum, double tail_at_y) {
    require(x > 0.0 && y > 0.0, "fuk-nagaev needs x, y > 0");
    require(p > 2.0, "fuk-nagaev needs p > 2");
    require(m_p >= 0.0 && var_sum >= 0.0 && tail_at_y >= 0.0, "fuk-nagaev needs nonnegative moments");
    const double beta = p / (p + 2.0);
    const double middle = std::pow(m_p / (beta * x * std::pow(y, p - 1.0)), beta * x / y);
    const double gauss =
        var_sum > 0.0 ? std::exp(-(1.0 - beta) * (1.0 - beta) * x * x / (2.0 * std::exp(p) * var_sum)) : 0.0;
    return capped(tail_at_y + middle + gauss);
}

std::string to_string(PetrovReading r) { return r == PetrovReading::Standard ? "standard" : "literal"; }

int petrov_L(double p) {
    require(p > 1.0 && p <= 2.0, "petrov needs p in (1, 2]");
    return p == 2.0 ? 1 : 2;
}

double petrov_shift(double q0, double p, double m_p, PetrovReading reading) {
    require(q0 > 0.0 && q0 < 1.0, "petrov needs q0 in (0, 1)");
    require(m_p >= 0.0, "petrov needs m_p >= 0");
    const double L = petrov_L(p);
    const double base = reading == PetrovReading::Standard ? L * m_p / (1.0 - q0) : (1.0 - q0) * m_p / L;
    return std::pow(base, 1.0 / p);
}

BoundValue petrov_max(double x, double q0, double p, double m_p, const std::function<double(double)>& tail_fn,
                      PetrovReading reading) {
    const double shift = petrov_shift(q0, p, m_p, reading);
    const double t = tail_fn(x - shift);
    require(t >= 0.0, "tail evaluator returned a negative value");
    return capped(t / q0);
}

BoundValue levy_ottaviani(double x, double c, double q, double tail_value) {
    require(std::isfinite(x), "levy-ottaviani needs finite x");
    require(c >= 0.0, "levy-ottaviani needs c >= 0");
    require(q > 0.0 && q <= 1.0, "levy-ottaviani needs q in (0, 1]");
    require(tail_value >= 0.0 && tail_value <= 1.0, "tail value must be a probability");
    return capped(tail_value / q);
}

// ---------------------------------------------------------------------------

std::string SummandLaw::describe() const {
    std::ostringstream os;
    switch (kind) {
        case SummandKind::Uniform: os << "Uniform(-1,1)"; break;
        case SummandKind::Rademacher: os << "Rademacher"; break;
        case SummandKind::Normal: os << "Normal(0,1)"; break;
        case SummandKind::CenteredExponential: os << "Exp(1)-1"; break;
        case SummandKind::CenteredPareto: os << "Pareto(" << a << ")-mean"; break;
        case SummandKind::SymmetricPareto: os << "SymPareto(" << a << ")"; break;
    }
    return os.str();
}

double summand_sample(const SummandLaw& law, Rng& rng) {
    switch (law.kind) {
        case SummandKind::Uniform: return 2.0 * rng.uniform() - 1.0;
        case SummandKind::Rademacher: return rng.uniform() < 0.5 ? -1.0 : 1.0;
        case SummandKind::Normal: return rng.normal();
        case SummandKind::CenteredExponential: return rng.exponential() - 1.0;
        case SummandKind::CenteredPareto:
            return std::pow(rng.uniform(), -1.0 / law.a) - law.a / (law.a - 1.0);
        case SummandKind::SymmetricPareto: {
            const double s = rng.uniform() < 0.5 ? -1.0 : 1.0;
            return s * std::pow(rng.uniform(), -1.0 / law.a);
        }
    }
    return 0.0;
}

double summand_abs_moment(const SummandLaw& law, double p) {
    require(p > 0.0, "moment order must be positive");
    switch (law.kind) {
        case SummandKind::Uniform: return 1.0 / (p + 1.0);
        case SummandKind::Rademacher: return 1.0;
        case SummandKind::Normal:
            return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(M_PI);
        case SummandKind::CenteredExponential: {
            const double inner = integrate([p](double t) { return std::pow(1.0 - t, p) * std::exp(-t); }, 0.0, 1.0);
            return inner + std::exp(-1.0) * std::tgamma(p + 1.0);
        }
        case SummandKind::CenteredPareto: {
            if (p >= law.a) return kInf;
            const double a = law.a;
            const double m = a / (a - 1.0);
            auto dens = [a](double t) { return a * std::pow(t, -a - 1.0); };
            const double left = integrate([&](double t) { return std::pow(m - t, p) * dens(t); }, 1.0, m);
            // substitute t = m + s
            const double right =
                integrate([&](double s) { return std::pow(s, p) * dens(m + s); }, 0.0, kInf);
            return left + right;
        }
        case SummandKind::SymmetricPareto:
            return p >= law.a ? kInf : law.a / (law.a - p);
    }
    return kInf;
}

double summand_variance(const SummandLaw& law) {
    switch (law.kind) {
        case SummandKind::Uniform: return 1.0 / 3.0;
        case SummandKind::Rademacher:
        case SummandKind::Normal:
        case SummandKind::CenteredExponential: return 1.0;
        case SummandKind::CenteredPareto:
            return law.a > 2.0 ? law.a / ((law.a - 1.0) * (law.a - 1.0) * (law.a - 2.0)) : kInf;
        case SummandKind::SymmetricPareto: return law.a > 2.0 ? law.a / (law.a - 2.0) : kInf;
    }
    return kInf;
}

double summand_tail(const SummandLaw& law, double y) {
    switch (law.kind) {
        case SummandKind::Uniform: return std::clamp((1.0 - y) / 2.0, 0.0, 1.0);
        case SummandKind::Rademacher: return y >= 1.0 ? 0.0 : (y >= -1.0 ? 0.5 : 1.0);
        case SummandKind::Normal: return 0.5 * std::erfc(y / std::sqrt(2.0));
        case SummandKind::CenteredExponential: return y <= -1.0 ? 1.0 : std::exp(-(y + 1.0));
        case SummandKind::CenteredPareto: {
            const double t = y + law.a / (law.a - 1.0);
            return t <= 1.0 ? 1.0 : std::pow(t, -law.a);
        }
        case SummandKind::SymmetricPareto:
            if (y >= 1.0) return 0.5 * std::pow(y, -law.a);
            if (y >= -1.0) return 0.5;
            return 1.0 - 0.5 * std::pow(-y, -law.a);
    }
    return 0.0;
}

double summand_bound(const SummandLaw& law) {
    switch (law.kind) {
        case SummandKind::Uniform:
        case SummandKind::Rademacher: return 1.0;
        default: return kInf;
    }
}

std::optional<std::function<double(double)>> exact_sum_tail(const SummandLaw& law, std::uint64_t n) {
    const double N = static_cast<double>(n);
    if (law.kind == SummandKind::Normal)
        return [N](double t) { return 0.5 * std::erfc(t / std::sqrt(2.0 * N)); };
    if (law.kind == SummandKind::Rademacher) {
        // R_n = 2K - n with K ~ Bin(n, 1/2); P(R_n > t) = P(K > (n + t) / 2)
        return [N](double t) {
            const double k = (N + t) / 2.0;
            if (k < 0.0) return 1.0;
            if (k >= N) return 0.0;
            const boost::math::binomial_distribution<double> bin(N, 0.5);
            return boost::math::cdf(boost::math::complement(bin, std::floor(k)));
        };
    }
    return std::nullopt;
}

std::string to_string(BoundId b) {
    switch (b) {
        case BoundId::Prokhorov: return "prokhorov";
        case BoundId::NagaevSV: return "nagaev_sv";
        case BoundId::FukNagaev: return "fuk_nagaev";
        case BoundId::Petrov: return "petrov_max";
        case BoundId::LevyOttaviani: return "levy_ottaviani";
    }
    return "?";
}

std::vector<SuiteCase> default_suite() {
    using K = SummandKind;
    std::vector<SuiteCase> s;
    auto add = [&](std::string name, BoundId b, SummandLaw law, std::uint64_t n, double x) -> SuiteCase& {
        SuiteCase c;
        c.name = std::move(name);
        c.bound = b;
        c.law = law;
        c.n = n;
        c.x = x;
        s.push_back(c);
        return s.back();
    };
    for (double x : {5.0, 10.0, 15.0}) add("prokhorov_uniform_x" + std::to_string(int(x)), BoundId::Prokhorov, {K::Uniform}, 100, x).y = 1.0;
    add("prokhorov_rademacher", BoundId::Prokhorov, {K::Rademacher}, 50, 10.0).y = 1.0;

    auto& n1 = add("nagaev_pareto_x300", BoundId::NagaevSV, {K::CenteredPareto, 1.5}, 100, 300.0);
    n1.y = 100.0;
    n1.p = 1.2;
    auto& n2 = add("nagaev_pareto_x1000", BoundId::NagaevSV, {K::CenteredPareto, 1.5}, 100, 1000.0);
    n2.y = 1000.0 / 3.0;
    n2.p = 1.2;
    auto& n3 = add("nagaev_sympareto3", BoundId::NagaevSV, {K::SymmetricPareto, 3.0}, 100, 50.0);
    n3.y = 25.0;
    n3.p = 2.0;

    auto& f1 = add("fuknagaev_exp", BoundId::FukNagaev, {K::CenteredExponential}, 100, 40.0);
    f1.y = 10.0;
    f1.p = 3.0;
    auto& f2 = add("fuknagaev_sympareto4", BoundId::FukNagaev, {K::SymmetricPareto, 4.0}, 100, 60.0);
    f2.y = 15.0;
    f2.p = 3.0;
    auto& f3 = add("fuknagaev_uniform", BoundId::FukNagaev, {K::Uniform}, 100, 15.0);
    f3.y = 5.0;
    f3.p = 4.0;

    auto& p1 = add("petrov_normal", BoundId::Petrov, {K::Normal}, 100, 20.0);
    p1.p = 2.0;
    p1.q0 = 0.5;
    auto& p2 = add("petrov_rademacher_p1.5", BoundId::Petrov, {K::Rademacher}, 100, 60.0);
    p2.p = 1.5;
    p2.q0 = 0.5;
    auto& p3 = add("petrov_exp_q0.9", BoundId::Petrov, {K::CenteredExponential}, 100, 5.0);
    p3.p = 2.0;
    p3.q0 = 0.9;

    add("levy_uniform", BoundId::LevyOttaviani, {K::Uniform}, 100, 10.0).c = 3.0;
    add("levy_pareto", BoundId::LevyOttaviani, {K::CenteredPareto, 1.5}, 100, 100.0).c = 30.0;
    return s;
}

std::vector<const DominanceRow*> DominanceReport::failures() const {
    std::vector<const DominanceRow*> out;
    for (const auto& r : rows)
        if (!r.pass) out.push_back(&r);
    return out;
}

namespace {

struct PathStats {
    std::vector<double> sum;
    std::vector<double> max;
};

struct CountTally {
    std::vector<std::uint64_t> count;
    std::uint64_t paths = 0;

    void merge(const CountTally& o) {
        if (count.size() < o.count.size()) count.resize(o.count.size(), 0);
        for (std::size_t i = 0; i < o.count.size(); ++i) count[i] += o.count[i];
        paths += o.paths;
    }
};

PathStats simulate_sums(const SummandLaw& law, std::uint64_t n, std::uint64_t trials, const RandomStream& stream,
                        const ExecPolicy& exec) {
    const auto chunks = map_chunks<PathStats>(trials, stream, exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
        PathStats out;
        out.sum.reserve(m);
        out.max.reserve(m);
        for (std::uint64_t i = 0; i < m; ++i) {
            double r = 0.0;
            double top = -kInf;
            for (std::uint64_t k = 0; k < n; ++k) {
                r += summand_sample(law, rng);
                top = std::max(top, r);
            }
            out.sum.push_back(r);
            out.max.push_back(top);
        }
        return out;
    });
    PathStats all;
    for (const auto& c : chunks) {
        all.sum.insert(all.sum.end(), c.sum.begin(), c.sum.end());
        all.max.insert(all.max.end(), c.max.begin(), c.max.end());
    }
    return all;
}

/// Lower confidence bound on min over m in [0, n-1] of P(R_m >= -c).
double levy_q_lower(const SummandLaw& law, std::uint64_t n, double c, std::uint64_t trials,
                    const RandomStream& stream, const ExecPolicy& exec) {
    const CountTally t = reduce_chunks<CountTally>(trials, stream, exec, [&](Rng& rng, std::uint64_t, std::uint64_t m) {
        CountTally out;
        out.count.assign(n, 0);
        for (std::uint64_t i = 0; i < m; ++i) {
            double r = 0.0;
            ++out.count[0];
            for (std::uint64_t k = 1; k < n; ++k) {
                r += summand_sample(law, rng);
                if (r >= -c) ++out.count[k];
            }
            ++out.paths;
        }
        return out;
    });
    const double N = static_cast<double>(t.paths);
    double q = 1.0;
    for (std::uint64_t k = 0; k < n; ++k) {
        const double ph = static_cast<double>(t.count[k]) / N;
        q = std::min(q, ph - 3.0 * std::sqrt(ph * (1.0 - ph) / N));
    }
    return q;
}

double frac_above(const std::vector<double>& sorted, double t) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

std::string fmt(const char* key, double v) {
    std::ostringstream os;
    os << key << '=' << v;
    return os.str();
}

}  // namespace

DominanceReport verify_dominance(const std::vector<SuiteCase>& suite, std::optional<BoundId> only,
                                 std::uint64_t trials, const RandomStream& stream, const ExecPolicy& exec,
                                 PetrovReading reading) {
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be positive");
    DominanceReport rep;
    rep.trials = trials;
    rep.reading = reading;
    rep.all_pass = true;
    for (std::size_t i = 0; i < suite.size(); ++i) {
        const SuiteCase& c = suite[i];
        if (only && *only != c.bound) continue;
        DominanceRow row;
        row.config = c;
        const RandomStream cs = stream.child(i);
        PathStats ps = simulate_sums(c.law, c.n, trials, cs.child("paths"), exec);
        std::sort(ps.sum.begin(), ps.sum.end());
        std::sort(ps.max.begin(), ps.max.end());
        const double N = static_cast<double>(c.n);
        bool hypotheses = true;
        std::string params = "law=" + c.law.describe() + ";" + fmt("n", N);
        bool use_max = false;
        switch (c.bound) {
            case BoundId::Prokhorov: {
                hypotheses = summand_bound(c.law) <= c.y;
                const double bn = N * summand_variance(c.law);
                row.bound = prokhorov(c.x, c.y, bn);
                params += ";" + fmt("y", c.y) + ";" + fmt("B_n", bn);
                break;
            }
            case BoundId::NagaevSV: {
                const double mp = N * summand_abs_moment(c.law, c.p);
                const double tail = N * summand_tail(c.law, c.y);
                hypotheses = std::isfinite(mp);
                row.bound = nagaev_sv(c.x, c.y, c.p, mp, tail);
                params += ";" + fmt("y", c.y) + ";" + fmt("p", c.p) + ";" + fmt("m_p", mp) + ";" + fmt("tail", tail);
                break;
            }
            case BoundId::FukNagaev: {
                const double mp = N * summand_abs_moment(c.law, c.p);
                const double bn = N * summand_variance(c.law);
                const double tail = N * summand_tail(c.law, c.y);
                hypotheses = std::isfinite(mp) && std::isfinite(bn);
                row.bound = fuk_nagaev(c.x, c.y, c.p, mp, bn, tail);
                params += ";" + fmt("y", c.y) + ";" + fmt("p", c.p) + ";" + fmt("m_p", mp) + ";" + fmt("B_n", bn) +
                          ";" + fmt("tail", tail);
                break;
            }
            case BoundId::Petrov: {
                const double mp = N * summand_abs_moment(c.law, c.p);
                hypotheses = std::isfinite(mp);
                const auto exact = exact_sum_tail(c.law, c.n);
                const std::function<double(double)> tail_fn =
                    exact ? *exact : std::function<double(double)>([&ps](double t) { return frac_above(ps.sum, t); });
                row.bound = petrov_max(c.x, c.q0, c.p, mp, tail_fn, reading);
                params += ";" + fmt("p", c.p) + ";" + fmt("q0", c.q0) + ";" + fmt("m_p", mp) +
                          ";shift=" + std::to_string(petrov_shift(c.q0, c.p, mp, reading)) +
                          ";reading=" + to_string(reading) + (exact ? ";tail=exact" : ";tail=mc");
                use_max = true;
                break;
            }
            case BoundId::LevyOttaviani: {
                const double q = levy_q_lower(c.law, c.n, c.c, trials, cs.child("q"), exec);
                hypotheses = q > 0.0;
                const double tail = frac_above(ps.sum, c.x - c.c);
                row.bound = hypotheses ? levy_ottaviani(c.x, c.c, std::min(1.0, q), tail) : BoundValue{};
                params += ";" + fmt("c", c.c) + ";" + fmt("q_lower", q) + ";" + fmt("tail", tail);
                use_max = true;
                break;
            }
        }
        const double ph = frac_above(use_max ? ps.max : ps.sum, c.x);
        row.empirical = ph;
        row.empirical_se = std::sqrt(ph * (1.0 - ph) / static_cast<double>(trials));
        row.params = params + (hypotheses ? "" : ";hypotheses=violated");
        row.pass = hypotheses && row.empirical + 3.0 * row.empirical_se <= row.bound.capped;
        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace klab
