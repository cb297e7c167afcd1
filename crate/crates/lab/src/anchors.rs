//! The inequality each emitted row measures.

pub const EXTENSION: &str = "‖E Q_s f‖_{L^q(B(0,2^{2s}))} ≲ ‖f‖_{L^q(I_0)}, q > 4";
pub const INTERMEDIATE: &str = "‖f‖_{L^{2q/(q-2)}} enters through 2q/(q-2) < q for q > 4";
pub const FIRST_DECOUPLING: &str = "∫|Σ_{m,n} G_m∗G_n|^p ≤ C_p Σ_{m,n} ∫|G_m∗G_n|^p, p = q/(q-2)";
pub const OVERLAP: &str = "#{(m,n) : z ∈ R_m + R_n} ≤ C independent of s";
pub const SUM_AREA: &str = "|R_m + R_n| ≈ C²(1+|m-n|)2^{-3s}";
pub const INTERSECT_AREA: &str = "|R_m ∩ (R_n + z)| ≲ C²2^{-3s}/(1+|m-n|)";
pub const DIRICHLET_L4: &str = "‖δ_{2^{-s}}D_M‖_4^4 ≈ 2^s·2^{3(1-λ)s}, M = 2^{(1-λ)s}";
pub const KERNEL_DECOUPLING: &str = "‖Σ_m f_m‖_p^p ≤ C_p Σ_m ‖f_m‖_p^p for disjoint effective supports";
pub const AVG_TRANS: &str =
    "|Main(0;m,ξ)| ≲ C|δ_{2^{-s}}D_M(ξ₁-m̃)|(Avg|Ã_m^f|)2^{-s}2^{λs}ξ₂^{-1/2}";
pub const SEQ_INEQUALITY: &str = "Σ_m (Avg|Ã_m^f|)^4 ≤ C‖f‖_{L^4}^4";
pub const SEQ_LINF: &str = "max_m |⟨f̄_s, φ^m⟩| ≤ C‖f‖_∞";
