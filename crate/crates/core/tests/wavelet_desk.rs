mod common;

use common::wavelet_norm_equivalence;

#[test]
fn weighted_wavelet_energy_tracks_sobolev_proxy() {
    for s in [1, 2] {
        let (a, b, drift) = wavelet_norm_equivalence(s, 64);
        assert!(a.1 / a.0 <= 50.0 && b.1 / b.0 <= 50.0, "s={s}: {a:?} {b:?}");
        assert!(drift < 2.0, "s={s}: drift {drift}");
    }
}
