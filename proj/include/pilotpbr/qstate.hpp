#pragma once

// Finite-dimensional pure states, orthonormal bases and the Born rule.
//
// Tensor products use the row-major index convention: for a of dimension m
// and b of dimension n, component (i, j) of a (x) b sits at index i*n + j.
// Two qubits therefore order as |00>, |01>, |10>, |11>.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pilotpbr::qstate {

using Complex = std::complex<double>;

inline constexpr double kEpsOrtho = 1e-10;
inline constexpr double kEpsNorm = 1e-12;

class Ket {
 public:
  // Throws InvariantError on an empty amplitude list.
  explicit Ket(std::vector<Complex> amplitudes);

  // Computational basis vector |index> in `dim` dimensions.
  static Ket basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_.at(i); }

  double norm_squared() const noexcept;
  double norm() const noexcept;

 private:
  std::vector<Complex> amplitudes_;
};

// Sum of conj(a_i) * b_i. Throws DimensionError when dims differ.
Complex inner(const Ket& a, const Ket& b);

Ket tensor(const Ket& a, const Ket& b);

// Throws InvariantError for the zero vector.
Ket normalize(const Ket& k);

// alpha*a + beta*b, unnormalized.
Ket combine(Complex alpha, const Ket& a, Complex beta, const Ket& b);

class MeasurementBasis {
 public:
  // Validates |<v_i|v_j> - delta_ij| < kEpsOrtho; throws InvariantError otherwise.
  // Outcomes are labelled "0", "1", ... unless labels are given.
  MeasurementBasis(std::vector<Ket> vectors, std::string label);
  MeasurementBasis(std::vector<Ket> vectors, std::string label,
                   std::vector<std::string> outcome_labels);

  static MeasurementBasis computational(std::size_t dim, std::string label);

  std::size_t dim() const noexcept { return vectors_.size(); }
  const std::vector<Ket>& vectors() const noexcept { return vectors_; }
  const Ket& operator[](std::size_t i) const { return vectors_.at(i); }
  const std::string& label() const noexcept { return label_; }
  const std::vector<std::string>& outcome_labels() const noexcept { return outcome_labels_; }

 private:
  std::vector<Ket> vectors_;
  std::string label_;
  std::vector<std::string> outcome_labels_;
};

// Largest entrywise deviation of the Gram matrix from the identity.
double orthonormality_error(std::span<const Ket> vectors);

// p_i = |<v_i|state>|^2.
std::vector<double> born_probabilities(const MeasurementBasis& basis, const Ket& state);

}  // namespace pilotpbr::qstate
