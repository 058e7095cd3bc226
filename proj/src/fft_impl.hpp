#pragma once

#include <cstddef>
#include <utility>

namespace mvsp::detail {

template <class LineOp>
std::vector<cplx> transform_axis(const std::vector<cplx>& tensor, std::vector<int>& shape, int axis,
                                 LineOp&& line_op) {
  std::size_t outer = 1;
  std::size_t inner = 1;
  for (int i = 0; i < axis; ++i) outer *= static_cast<std::size_t>(shape[i]);
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= static_cast<std::size_t>(shape[i]);
  const auto len = static_cast<std::size_t>(shape[axis]);

  std::vector<cplx> out;
  std::size_t new_len = 0;
  std::vector<cplx> line(len);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      line.assign(len, cplx{});
      for (std::size_t j = 0; j < len; ++j) line[j] = tensor[(o * len + j) * inner + in];
      std::vector<cplx> result = line_op(std::span<const cplx>(line));
      if (out.empty()) {
        new_len = result.size();
        out.assign(outer * new_len * inner, cplx{});
      }
      for (std::size_t j = 0; j < new_len; ++j) out[(o * new_len + j) * inner + in] = result[j];
    }
  }
  shape[axis] = static_cast<int>(new_len);
  return out;
}

}  // namespace mvsp::detail
