#include "lab/symmetry.hpp"

#include <stdexcept>

#include "lab/common.hpp"

namespace lab {

BackmapMode backmap_from_string(const std::string& s) {
  if (s == "coordinate") return BackmapMode::Coordinate;
  if (s == "vvlabel") return BackmapMode::VvLabel;
  throw ConfigError("backmap must be 'coordinate' or 'vvlabel', got '" + s + "'");
}

std::string to_string(BackmapMode mode) {
  return mode == BackmapMode::Coordinate ? "coordinate" : "vvlabel";
}

Instance involution_ti(const Instance& inst, size_t i) {
  if (i >= inst.cnf.m) {
    throw std::out_of_range("involution_ti: coordinate out of range");
  }
  if (!inst.witness_checks_out()) {
    throw std::invalid_argument("involution_ti: instance is not on-promise");
  }
  BitVector e_i = BitVector::unit(inst.cnf.m, i);
  Instance out;
  out.cnf = flip_signs(inst.cnf, e_i);
  out.vv.k = inst.vv.k;
  out.vv.a = inst.vv.a;
  out.vv.b = inst.vv.b ^ inst.vv.a.column(i);
  out.witness = *inst.witness ^ e_i;
  return out;
}

Instance sign_flip_g(const Instance& inst, const BitVector& sigma) {
  if (sigma.size() != inst.cnf.m) {
    throw std::invalid_argument("sign_flip_g: sigma length mismatch");
  }
  Instance out;
  out.cnf = flip_signs(inst.cnf, sigma);
  out.vv.k = inst.vv.k;
  out.vv.a = inst.vv.a;
  out.vv.b = inst.vv.b ^ inst.vv.a.mul(sigma);
  if (inst.witness.has_value()) out.witness = *inst.witness ^ sigma;
  return out;
}

bool back_map(bool pred, const BitVector& a_i, const BitVector& sigma,
              const BitVector& label_shift, size_t i, BackmapMode mode) {
  if (mode == BackmapMode::Coordinate) return pred ^ sigma.get(i);
  return pred ^ dot(a_i, label_shift);
}

LocalInput local_input(const Instance& inst, const SilsVector& z, size_t i) {
  LocalInput u;
  u.z = z;
  u.a = inst.vv.a.column(i);
  u.b = inst.vv.b;
  return u;
}

}  // namespace lab
