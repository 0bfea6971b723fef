#pragma once
#include <cstddef>

namespace qw::plane {

// Helpers acting on one spin plane of a cell-major, spin-minor array:
// element (i1, i2) of plane `spin` lives at base[2*(i1 + l1*i2) + spin].

// Cyclic shift along axis 1 by +1 or -1.
template <class T>
void shift_axis1(T* base, int l1, int l2, int spin, int dir) {
  for (int i2 = 0; i2 < l2; ++i2) {
    T* row = base + 2 * (static_cast<size_t>(i2) * l1) + spin;
    if (dir > 0) {
      const T last = row[2 * (l1 - 1)];
      for (int i1 = l1 - 1; i1 > 0; --i1) row[2 * i1] = row[2 * (i1 - 1)];
      row[0] = last;
    } else {
      const T first = row[0];
      for (int i1 = 0; i1 < l1 - 1; ++i1) row[2 * i1] = row[2 * (i1 + 1)];
      row[2 * (l1 - 1)] = first;
    }
  }
}

// Cyclic shift along axis 2, optionally leaving one column untouched
// (the lead column of a scattering geometry).
template <class T>
void shift_axis2(T* base, int l1, int l2, int spin, int dir, int skip_column) {
  const size_t stride = 2 * static_cast<size_t>(l1);
  for (int i1 = 0; i1 < l1; ++i1) {
    if (i1 == skip_column) continue;
    T* col = base + 2 * i1 + spin;
    if (dir > 0) {
      const T last = col[stride * (l2 - 1)];
      for (int i2 = l2 - 1; i2 > 0; --i2) col[stride * i2] = col[stride * (i2 - 1)];
      col[0] = last;
    } else {
      const T first = col[0];
      for (int i2 = 0; i2 < l2 - 1; ++i2) col[stride * i2] = col[stride * (i2 + 1)];
      col[stride * (l2 - 1)] = first;
    }
  }
}

}  // namespace qw::plane
