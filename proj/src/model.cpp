#include "epm/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace epm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::cosine(int dim, int axis, double amp) {
  TrigTerm t;
  t.freq.assign(dim, 0);
  t.freq[axis] = 1;
  t.cos_amp = amp;
  PotentialSpec spec;
  spec.kind = Kind::Trig;
  spec.terms.push_back(std::move(t));
  return spec;
}

PotentialSpec PotentialSpec::trig(std::vector<TrigTerm> t) {
  PotentialSpec spec;
  spec.kind = Kind::Trig;
  spec.terms = std::move(t);
  return spec;
}

PotentialSpec PotentialSpec::tabulated(ScalarField f) {
  PotentialSpec spec;
  spec.kind = Kind::Tabulated;
  spec.table = std::move(f);
  return spec;
}

double eval_U(const PotentialSpec& spec, std::span<const double> x) {
  switch (spec.kind) {
    case PotentialSpec::Kind::Zero:
      for (double c : x) wrap1(c);  // still reject non-finite input
      return 0.0;
    case PotentialSpec::Kind::Trig: {
      double u = 0.0;
      for (const TrigTerm& t : spec.terms) {
        if (t.freq.size() != x.size())
          throw std::invalid_argument("eval_U: frequency vector length mismatch");
        double phase = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) phase += t.freq[c] * wrap1(x[c]);
        phase *= kTwoPi;
        u += t.cos_amp * std::cos(phase) + t.sin_amp * std::sin(phase);
      }
      return u;
    }
    case PotentialSpec::Kind::Tabulated: {
      const ScalarField& tab = *spec.table;
      if (static_cast<int>(x.size()) != tab.grid.dim)
        throw std::invalid_argument("eval_U: point dimension mismatch");
      // Tabulated potentials answer only exact grid-point queries.
      std::vector<int> mi(tab.grid.dim);
      for (int c = 0; c < tab.grid.dim; ++c) {
        double w = wrap1(x[c]);
        double idx = w * tab.grid.points;
        double r = std::round(idx);
        if (std::abs(idx - r) > 1e-9)
          throw std::invalid_argument("eval_U: off-grid query on tabulated potential");
        mi[c] = static_cast<int>(r);
      }
      return tab[tab.grid.flat_index(mi)];
    }
  }
  throw std::logic_error("eval_U: bad potential kind");
}

void ModelParams::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("ModelParams: epsilon must be > 0");
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("ModelParams: h must be > 0");
  if (dim < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
  if (static_cast<int>(P.size()) != dim)
    throw std::invalid_argument("ModelParams: P must have exactly n entries");
  for (double p : P)
    if (!std::isfinite(p)) throw std::invalid_argument("ModelParams: P has a non-finite entry");
  if (potential.kind == PotentialSpec::Kind::Trig) {
    for (const TrigTerm& t : potential.terms)
      if (static_cast<int>(t.freq.size()) != dim)
        throw std::invalid_argument("ModelParams: potential frequency dimension mismatch");
  } else if (potential.kind == PotentialSpec::Kind::Tabulated) {
    if (potential.table->grid.dim != dim)
      throw std::invalid_argument("ModelParams: tabulated potential dimension mismatch");
  }
}

double eval_L(const ModelParams& params, std::span<const double> x, std::span<const double> v) {
  if (static_cast<int>(x.size()) != params.dim || static_cast<int>(v.size()) != params.dim)
    throw std::invalid_argument("eval_L: dimension mismatch");
  double vv = 0.0, pv = 0.0;
  for (int c = 0; c < params.dim; ++c) {
    vv += v[c] * v[c];
    pv += params.P[c] * v[c];
  }
  return 0.5 * vv - eval_U(params.potential, x) + pv;
}

}  // namespace epm
