#include "pilotpbr/qstate.hpp"

#include <algorithm>
#include <cmath>

#include "pilotpbr/error.hpp"

namespace pilotpbr::qstate {

Ket::Ket(std::vector<Complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.empty()) throw InvariantError("ket must have positive dimension");
}

Ket Ket::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw DimensionError("basis index out of range");
  std::vector<Complex> amps(dim, Complex{0.0, 0.0});
  amps[index] = 1.0;
  return Ket(std::move(amps));
}

double Ket::norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& c : amplitudes_) s += std::norm(c);
  return s;
}

double Ket::norm() const noexcept { return std::sqrt(norm_squared()); }

Complex inner(const Ket& a, const Ket& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("inner product of kets with dimensions " + std::to_string(a.dim()) +
                         " and " + std::to_string(b.dim()));
  }
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

Ket tensor(const Ket& a, const Ket& b) {
  std::vector<Complex> amps;
  amps.reserve(a.dim() * b.dim());
  for (const auto& x : a.amplitudes())
    for (const auto& y : b.amplitudes()) amps.push_back(x * y);
  return Ket(std::move(amps));
}

Ket normalize(const Ket& k) {
  const double n = k.norm();
  if (!(n > 0.0)) throw InvariantError("cannot normalize the zero vector");
  std::vector<Complex> amps(k.amplitudes().begin(), k.amplitudes().end());
  for (auto& c : amps) c /= n;
  return Ket(std::move(amps));
}

Ket combine(Complex alpha, const Ket& a, Complex beta, const Ket& b) {
  if (a.dim() != b.dim()) throw DimensionError("combining kets of different dimension");
  std::vector<Complex> amps(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) amps[i] = alpha * a[i] + beta * b[i];
  return Ket(std::move(amps));
}

double orthonormality_error(std::span<const Ket> vectors) {
  double worst = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      const Complex g = inner(vectors[i], vectors[j]);
      worst = std::max(worst, std::abs(g - Complex{i == j ? 1.0 : 0.0, 0.0}));
    }
  }
  return worst;
}

namespace {

std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

}  // namespace

MeasurementBasis::MeasurementBasis(std::vector<Ket> vectors, std::string label)
    : MeasurementBasis(std::move(vectors), std::move(label), {}) {}

MeasurementBasis::MeasurementBasis(std::vector<Ket> vectors, std::string label,
                                   std::vector<std::string> outcome_labels)
    : vectors_(std::move(vectors)), label_(std::move(label)),
      outcome_labels_(std::move(outcome_labels)) {
  if (vectors_.empty()) throw InvariantError("basis '" + label_ + "' is empty");
  if (outcome_labels_.empty()) outcome_labels_ = index_labels(vectors_.size());
  if (outcome_labels_.size() != vectors_.size()) {
    throw DimensionError("basis '" + label_ + "' needs one outcome label per vector");
  }
  for (const auto& v : vectors_) {
    if (v.dim() != vectors_.size()) {
      throw DimensionError("basis '" + label_ + "' needs " + std::to_string(vectors_.size()) +
                           "-dimensional vectors");
    }
  }
  const double err = orthonormality_error(vectors_);
  if (!(err < kEpsOrtho)) {
    throw InvariantError("basis '" + label_ + "' is not orthonormal (Gram error " +
                         std::to_string(err) + ")");
  }
}

MeasurementBasis MeasurementBasis::computational(std::size_t dim, std::string label) {
  std::vector<Ket> vs;
  vs.reserve(dim);
  for (std::size_t i = 0; i < dim; ++i) vs.push_back(Ket::basis(dim, i));
  return MeasurementBasis(std::move(vs), std::move(label));
}

std::vector<double> born_probabilities(const MeasurementBasis& basis, const Ket& state) {
  if (basis.dim() != state.dim()) {
    throw DimensionError("basis '" + basis.label() + "' has dimension " +
                         std::to_string(basis.dim()) + " but state has " +
                         std::to_string(state.dim()));
  }
  std::vector<double> p;
  p.reserve(basis.dim());
  for (const auto& v : basis.vectors()) p.push_back(std::norm(inner(v, state)));
  return p;
}

}  // namespace pilotpbr::qstate
