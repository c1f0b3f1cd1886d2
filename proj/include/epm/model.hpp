#pragma once
// Model parameters and the Lagrangian L(x,v) = |v|^2/2 - U(x) + <P,v>.

#include <optional>
#include <span>
#include <vector>

#include "epm/grid.hpp"

namespace epm {

struct TrigTerm {
  std::vector<int> freq;  // integer frequency vector
  double cos_amp = 0.0;
  double sin_amp = 0.0;
};

// A smooth 1-periodic potential, either a finite trigonometric sum or a
// tabulated field.  Tabulated specs answer only exact grid-point queries.
struct PotentialSpec {
  enum class Kind { Zero, Trig, Tabulated };
  Kind kind = Kind::Zero;
  std::vector<TrigTerm> terms;
  std::optional<ScalarField> table;

  static PotentialSpec zero();
  static PotentialSpec cosine(int dim, int axis = 0, double amp = 1.0);  // amp*cos(2 pi x_axis)
  static PotentialSpec trig(std::vector<TrigTerm> t);
  static PotentialSpec tabulated(ScalarField f);
};

double eval_U(const PotentialSpec& spec, std::span<const double> x);

struct ModelParams {
  double epsilon = 1.0;  // entropy weight
  double h = 1.0;        // time step
  std::vector<double> P;
  PotentialSpec potential;
  int dim = 1;

  void validate() const;  // throws std::invalid_argument naming the bad field
};

// Sign convention: U enters L negatively, so replacing U by U + c lowers L by
// c and lowers the effective value lambda by h*c.
double eval_L(const ModelParams& params, std::span<const double> x, std::span<const double> v);

}  // namespace epm
