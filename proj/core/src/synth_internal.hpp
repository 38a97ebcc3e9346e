#pragma once

// Gate-emission helpers shared by the isometry synthesizer and the layer
// builder. Not installed.

#include <Eigen/Dense>
#include <vector>

#include "mpsenc/circuit.hpp"

namespace mpsenc::detail {

using Iso42d = Eigen::Matrix<double, 4, 2>;
using Iso42c = Eigen::Matrix<std::complex<double>, 4, 2>;

void emit_1q_so2(const Eigen::Matrix2d& u, int q, std::vector<Gate>& out);
void emit_prep_real(const Eigen::Vector2d& v, int q, std::vector<Gate>& out);
void emit_1q_zyz(const Eigen::Matrix2cd& u, int q, std::vector<Gate>& out);
void emit_prep_complex(const Eigen::Vector2cd& v, int q, std::vector<Gate>& out);

// |00> -> psi with psi(s_l, s_r); at most one CNOT. Returns the CNOT count.
int emit_2site_prep_real(const Eigen::Matrix2d& psi, int q_l, int q_r, std::vector<Gate>& out);
int emit_2site_prep_complex(const Eigen::Matrix2cd& psi, int q_l, int q_r,
                            std::vector<Gate>& out);

// 4x2 isometry v(2s+r, l): input on q_main, ancilla q_anc starts in |0>,
// output bit s lands on q_main and r on q_anc. Returns the CNOT count.
int emit_isometry_real(const Iso42d& v, int q_main, int q_anc, std::vector<Gate>& out);
int emit_isometry_complex(const Iso42c& v, int q_main, int q_anc, std::vector<Gate>& out);

// True when v is a product-class isometry U (x) b whose main factor has a
// negative determinant (the case the layer gauge pass must repair).
bool product_main_det_negative(const Iso42d& v);

}  // namespace mpsenc::detail
