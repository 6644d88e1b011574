#pragma once

// Short verbatim phrases locating each checked statement in the source text.
namespace pseudoglue::anchors {

inline constexpr const char* compatible = "compatible with (the gluing along) the pair";
inline constexpr const char* criterion = "admit compatible pseudo-metrics if and only if";
inline constexpr const char* dual = "pseudo-bundle diffeomorphism of its domain";
inline constexpr const char* isometry = "is a pseudo-bundle isometry between";
inline constexpr const char* chain = "satisfy the gluing-dual commutativity condition";
inline constexpr const char* induced = "can be defined to coincide with either $g_1$ or $g_2$ on each fibre individually";
inline constexpr const char* via_phi = "by taking the following composition of it with the switch map and the commutativity diffeomorphisms";
inline constexpr const char* identities = "fully defined) by the following identities";
inline constexpr const char* switch_cover = "covering the switch map";
inline constexpr const char* relation = "preserves the defining relation for Clifford algebras";
inline constexpr const char* universal = "induced by $\\tilde{f}$ via the universal property of Clifford algebras";
inline constexpr const char* cl_identity = "covering the identity on $X_1\\cup_f X_2$";
inline constexpr const char* three_shapes = "also guarantee that they are in fact equivalent";
inline constexpr const char* alt = "It is then quite trivial";
inline constexpr const char* contra_exterior = "covering the identity map on $X_1\\cup_f X_2$";
inline constexpr const char* cov_exterior = "commutativity of $\\Phi_{\\cup,*}^{\\otimes n}$ with the relevant alternating operators";
inline constexpr const char* action_compat = "The actions $c_1$ and $c_2$";
inline constexpr const char* contra_action = "be such that $\\pi^{C \\kern -0.1em \\ell}(v)=\\pi^{\\bigwedge_*}(e)$";
inline constexpr const char* cov_action = "be such that $\\pi^{\\bigwedge}(e)=\\pi^{C \\kern -0.1em \\ell}(v)$";
inline constexpr const char* cov_action_glued = "This is a direct consequence of Theorem";

}  // namespace pseudoglue::anchors
