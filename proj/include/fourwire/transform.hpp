#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fourwire/model.hpp"

namespace fourwire {

/// The four impedance mappings: do-nothing O, Kron K, phase-to-neutral T,
/// modified phase-to-neutral U.
enum class TransformKind { Identity, Kron, PhaseToNeutral, ModifiedPN };

char transform_tag(TransformKind k);  // 'o' | 'k' | 't' | 'u'
std::optional<TransformKind> transform_from_tag(std::string_view tag);
std::string transform_name(TransformKind k);

using TMatrix = Eigen::MatrixXd;

/// The block [identity | -ones] matrix mapping phase-to-ground voltages to
/// phase-to-neutral voltages (rows = n_phases, cols = n_phases + 1).
TMatrix build_t_matrix(int n_phases);

ImpedanceMatrix transform_identity(const ImpedanceMatrix& z);

/// T * z * T' : exact phase-to-neutral reduction. Requires a trailing
/// neutral label and at least one phase.
ImpedanceMatrix transform_pn(const ImpedanceMatrix& z);

/// Mutual-free special case: diagonal z_pp + z_nn, off-diagonal z_nn.
ImpedanceMatrix transform_modified_pn(const ImpedanceMatrix& z);

/// Kron's reduction of the neutral: z_PP - z_PN z_NP / z_nn.
/// Requires |z_nn| > 1e-12 ohm.
ImpedanceMatrix transform_kron(const ImpedanceMatrix& z);

/// Shunt treatment under Kron's reduction: the phase block of y.
AdmittanceMatrix kron_shunt(const AdmittanceMatrix& y);

struct TransformResult {
  Network network;
  std::vector<std::string> warnings;  // one entry per line whose shunt was dropped
};

/// Whole-network transformation. Identity deep-copies; the neutral-eliminating
/// kinds map every line's series impedance, remove the neutral conductor from
/// every bus, and handle shunts per kind (dropped with a warning for T/U,
/// phase block for K). Never mutates its input.
TransformResult transform_network(const Network& net, TransformKind kind);

}  // namespace fourwire
