#include "klab/model.hpp"

#include <cmath>
#include <sstream>

#include "klab/error.hpp"

namespace klab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidModel, what);
}

void validate(const ALaw& a) {
    std::visit(overloaded{
                   [](const LognormalA& l) {
                       require(std::isfinite(l.mu) && l.sigma2 > 0 && std::isfinite(l.sigma2),
                               "LognormalA needs finite mu and sigma2 > 0");
                   },
                   [](const UniformA& u) { require(u.hi > 0 && std::isfinite(u.hi), "UniformA needs hi > 0"); },
                   [](const GammaScaledA& g) {
                       require(g.shape > 0 && g.scale > 0 && std::isfinite(g.shape) && std::isfinite(g.scale),
                               "GammaScaledA needs shape > 0 and scale > 0");
                   },
                   [](const ConstA& c) { require(c.value > 0 && std::isfinite(c.value), "ConstA needs value > 0"); },
               },
               a);
}

void validate(const BLaw& b) {
    std::visit(overloaded{
                   [](const ConstB& c) { require(std::isfinite(c.value), "ConstB needs a finite value"); },
                   [](const NormalB& n) {
                       require(std::isfinite(n.mu) && n.sigma2 > 0 && std::isfinite(n.sigma2),
                               "NormalB needs finite mu and sigma2 > 0");
                   },
                   [](const ParetoB& p) {
                       require(p.index > 0 && p.scale > 0 && std::isfinite(p.index) && std::isfinite(p.scale),
                               "ParetoB needs index > 0 and scale > 0");
                   },
                   [](const ExponentialB& e) {
                       require(e.rate > 0 && std::isfinite(e.rate), "ExponentialB needs rate > 0");
                   },
               },
               b);
}

}  // namespace

SREModel::SREModel(ALaw a, BLaw b, double b_sign) : a_(std::move(a)), b_(std::move(b)), b_sign_(b_sign) {
    validate(a_);
    validate(b_);
    require(b_sign_ == 1.0 || b_sign_ == -1.0, "b_sign must be +1 or -1");
}

std::string SREModel::describe() const {
    std::ostringstream os;
    os.precision(10);
    std::visit(overloaded{
                   [&](const LognormalA& l) { os << "LognormalA{mu=" << l.mu << ", sigma2=" << l.sigma2 << "}"; },
                   [&](const UniformA& u) { os << "UniformA{hi=" << u.hi << "}"; },
                   [&](const GammaScaledA& g) { os << "GammaScaledA{shape=" << g.shape << ", scale=" << g.scale << "}"; },
                   [&](const ConstA& c) { os << "ConstA{value=" << c.value << "}"; },
               },
               a_);
    os << " + " << (b_sign_ < 0 ? "-" : "");
    std::visit(overloaded{
                   [&](const ConstB& c) { os << "ConstB{value=" << c.value << "}"; },
                   [&](const NormalB& n) { os << "NormalB{mu=" << n.mu << ", sigma2=" << n.sigma2 << "}"; },
                   [&](const ParetoB& p) { os << "ParetoB{index=" << p.index << ", scale=" << p.scale << "}"; },
                   [&](const ExponentialB& e) { os << "ExponentialB{rate=" << e.rate << "}"; },
               },
               b_);
    return os.str();
}

double sample_a(const SREModel& model, Rng& rng) {
    return std::visit(overloaded{
                          [&](const LognormalA& l) { return std::exp(l.mu + std::sqrt(l.sigma2) * rng.normal()); },
                          [&](const UniformA& u) { return u.hi * rng.uniform(); },
                          [&](const GammaScaledA& g) { return g.scale * rng.gamma(g.shape); },
                          [&](const ConstA& c) { return c.value; },
                      },
                      model.a_law());
}

double sample_b(const SREModel& model, Rng& rng) {
    const double b = std::visit(overloaded{
                                    [&](const ConstB& c) { return c.value; },
                                    [&](const NormalB& n) { return n.mu + std::sqrt(n.sigma2) * rng.normal(); },
                                    [&](const ParetoB& p) { return p.scale * std::pow(rng.uniform(), -1.0 / p.index); },
                                    [&](const ExponentialB& e) { return rng.exponential() / e.rate; },
                                },
                                model.b_law());
    return model.b_sign() * b;
}

Pair sample_pair(const SREModel& model, Rng& rng) {
    const double a = sample_a(model, rng);
    const double b = sample_b(model, rng);
    return {a, b};
}

double sample_a_tilted(const SREModel& model, double h, Rng& rng) {
    return std::visit(overloaded{
                          // log A ~ N(mu + h sigma2, sigma2)
                          [&](const LognormalA& l) {
                              return std::exp(l.mu + h * l.sigma2 + std::sqrt(l.sigma2) * rng.normal());
                          },
                          // density proportional to a^h on (0, hi)
                          [&](const UniformA& u) { return u.hi * std::pow(rng.uniform(), 1.0 / (h + 1.0)); },
                          [&](const GammaScaledA& g) { return g.scale * rng.gamma(g.shape + h); },
                          [&](const ConstA& c) { return c.value; },
                      },
                      model.a_law());
}

std::optional<double> b_mean(const SREModel& model) {
    const std::optional<double> m =
        std::visit(overloaded{
                       [](const ConstB& c) -> std::optional<double> { return c.value; },
                       [](const NormalB& n) -> std::optional<double> { return n.mu; },
                       [](const ParetoB& p) -> std::optional<double> {
                           if (p.index <= 1.0) return std::nullopt;
                           return p.index * p.scale / (p.index - 1.0);
                       },
                       [](const ExponentialB& e) -> std::optional<double> { return 1.0 / e.rate; },
                   },
                   model.b_law());
    if (!m) return std::nullopt;
    return model.b_sign() * *m;
}

bool b_moment_finite(const SREModel& model, double h) {
    if (const auto* p = std::get_if<ParetoB>(&model.b_law())) return p->index > h;
    return true;
}

bool b_nonnegative(const SREModel& model) {
    return std::visit(overloaded{
                          [&](const ConstB& c) { return model.b_sign() * c.value >= 0.0; },
                          [](const NormalB&) { return false; },
                          [&](const ParetoB&) { return model.b_sign() > 0; },
                          [&](const ExponentialB&) { return model.b_sign() > 0; },
                      },
                      model.b_law());
}

bool b_zero(const SREModel& model) {
    const auto* c = std::get_if<ConstB>(&model.b_law());
    return c != nullptr && c->value == 0.0;
}

}  // namespace klab
