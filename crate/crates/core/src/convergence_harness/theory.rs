//! Reference convergence exponents. These are lower bounds from the
//! asymptotic theory with unknown constants; sweeps report them next to the
//! fitted slopes but never gate on them.

use serde::Serialize;

use super::config::DataRecipe;

/// `K(q) = min(6/q − 1, 1 − 2/q)² / (6/q − 1)`, defined for `q ∈ (2, 6)`.
pub fn k_of_q(q: f64) -> Option<f64> {
    if !(q > 2.0 && q < 6.0) {
        return None;
    }
    let a = 6.0 / q - 1.0;
    Some(a.min(1.0 - 2.0 / q).powi(2) / a)
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoryReference {
    /// Strong solutions, general `ν, ν′`: `min(α₀, δ(1−η)/3108, 1/9324)`.
    pub strong_general: Option<f64>,
    /// Strong solutions with `ν = ν′`: `min(α₀, k(δ/2 − γ))` at `k → 1`.
    pub strong_equal: Option<f64>,
    /// Weak solutions, `L²_t L^q` rate `K(q)/640`.
    pub weak_general: Option<f64>,
    /// The same with `ν = ν′`: `K(q)/544`.
    pub weak_equal: Option<f64>,
    /// Global rate `3/16` of the oscillating part when `ν = ν′`.
    pub global_equal: Option<f64>,
    pub q: f64,
    /// Hypotheses that fail; each disables the matching exponent.
    pub flags: Vec<String>,
}

/// Reference exponents for a recipe. `equal_diffusion` is `ν = ν′` and `q`
/// the Lebesgue exponent of the weak-solution statement.
pub fn theoretical_exponents(
    recipe: &DataRecipe,
    equal_diffusion: bool,
    q: f64,
) -> TheoryReference {
    let (d, eta, g, a0) = (recipe.delta, recipe.eta, recipe.gamma, recipe.alpha0);
    let mut flags = Vec::new();
    let general_ok = {
        let mut ok = true;
        if !(d > 0.0 && d <= 1.0) {
            flags.push(format!("δ = {d} outside (0, 1]: no theoretical guarantee"));
            ok = false;
        }
        if !(eta > 0.0 && eta <= 0.5) || eta * d > 1.0 / 3.0 {
            flags.push(format!(
                "η = {eta} violates η ∈ (0, 1/2], ηδ ≤ 1/3: no theoretical guarantee"
            ));
            ok = false;
        }
        if g > DataRecipe::default_gamma(d, eta) * (1.0 + 1e-12) {
            flags.push(format!(
                "γ = {g} exceeds δ(1−η)/2784: no guarantee for the general case"
            ));
            ok = false;
        }
        ok
    };
    let strong_general = general_ok.then(|| a0.min(d * (1.0 - eta) / 3108.0).min(1.0 / 9324.0));
    let strong_equal = if !equal_diffusion {
        None
    } else if g >= d / 2.0 {
        flags.push(format!("γ = {g} ≥ δ/2: no guarantee for the ν = ν′ case"));
        None
    } else {
        Some(a0.min(d / 2.0 - g))
    };
    let weak = if d > 0.0 && d <= 0.125 {
        k_of_q(q)
    } else {
        flags.push(format!(
            "δ = {d} outside (0, 1/8]: no weak-solution guarantee"
        ));
        None
    };
    if k_of_q(q).is_none() {
        flags.push(format!("q = {q} outside (2, 6)"));
    }
    TheoryReference {
        strong_general,
        strong_equal,
        weak_general: weak.map(|k| k / 640.0),
        weak_equal: weak.filter(|_| equal_diffusion).map(|k| k / 544.0),
        global_equal: equal_diffusion.then_some(3.0 / 16.0),
        q,
        flags,
    }
}
