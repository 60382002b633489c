#pragma once

#include <iosfwd>
#include <string>

#include "radmaxlab/dyadic.hpp"

namespace radmaxlab::dyadic {

// CSV layout: a "# n=<n> J=<J> ncomp=<N> space=<spec>" line, the column
// header "cell,component,coordinate,real,imag", then one row per stored
// entry in storage order.
void write_csv(std::ostream& os, const GridFunction& u);
GridFunction read_csv(std::istream& is);

// Binary layout (little-endian): "RMLG", u32 version = 1, i32 n, i32 J,
// i32 ncomp, u32 length + bytes of the space spec, then (real, imag) f64
// pairs in storage order.
void write_binary(std::ostream& os, const GridFunction& u);
GridFunction read_binary(std::istream& is);

void save(const std::string& path, const GridFunction& u);
/// Dispatches on the extension: ".csv" or anything else for binary.
GridFunction load(const std::string& path);

}  // namespace radmaxlab::dyadic
