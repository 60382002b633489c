#pragma once

#include <array>
#include <functional>
#include <vector>

#include "radmaxlab/dyadic.hpp"

namespace radmaxlab::spectral {

/// Spatial shape of a periodic grid: n axes, 2^J cells per axis.
struct Shape {
  int n = 1;
  int J = 0;

  int side() const { return 1 << J; }
  std::int64_t cells() const { return std::int64_t{1} << (n * J); }
  bool operator==(const Shape&) const = default;
};

Shape shape_of(const dyadic::Grid& g);

/// Integer frequency of FFT bin f along each axis, in [-2^{J-1}, 2^{J-1}).
std::array<int, 2> frequency(const Shape& s, std::int64_t f);
/// 2 pi |xi| at bin f.
double zeta(const Shape& s, std::int64_t f);

/// A field is a (components * cells) x batch matrix, row = comp * cells + cell;
/// each column is one X coordinate (operators act on the C^N part only).
CMat to_field(const dyadic::GridFunction& u);
dyadic::GridFunction from_field(const dyadic::Grid& g, const CMat& field);

/// In-place FFT of every length-cells block of the column-major field.
/// The inverse is normalized.
void fft(CMat& field, const Shape& s, bool inverse);

/// Per-frequency matrices, indexed by FFT bin.
using Symbol = std::vector<CMat>;

Symbol make_symbol(const Shape& s, const std::function<CMat(const std::array<double, 2>& xi2pi)>& f);

/// 2 pi i xi as an n x 1 column.
Symbol gradient_symbol(const Shape& s);
/// Symbol of div: (2 pi i xi)^T as a 1 x n row.
Symbol divergence_symbol(const Shape& s);
/// -4 pi^2 |xi|^2.
Symbol laplacian_symbol(const Shape& s);

}  // namespace radmaxlab::spectral
