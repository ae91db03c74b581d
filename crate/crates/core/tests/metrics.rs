use num_complex::Complex64;
use papc::channel::generate_channel;
use papc::metrics::evaluate;
use papc::precoding::{cb_spc, zf_spc};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lowering_noise_never_lowers_sinr(seed in any::<u64>(), s1 in 1e-4f64..10.0, s2 in 1e-4f64..10.0) {
        let h = generate_channel(16, 4, seed).unwrap();
        let w = cb_spc(&h).unwrap().w;
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let a = evaluate(&h, &w, &[lo; 4]).unwrap();
        let b = evaluate(&h, &w, &[hi; 4]).unwrap();
        for k in 0..4 {
            prop_assert!(a.sinr[k] >= b.sinr[k]);
        }
    }

    #[test]
    fn interference_free_sinr_scales_quadratically(seed in any::<u64>(), c in 0.1f64..10.0) {
        let h = generate_channel(16, 4, seed).unwrap();
        let w = zf_spc(&h).unwrap().w;
        let a = evaluate(&h, &w, &[0.1; 4]).unwrap();
        let b = evaluate(&h, &(&w * Complex64::from(c)), &[0.1; 4]).unwrap();
        for k in 0..4 {
            prop_assert!((b.sinr[k] / a.sinr[k] - c * c).abs() < 1e-8 * c * c);
            prop_assert!((a.rates[k] - (1.0 + a.sinr[k]).log2()).abs() < 1e-12);
        }
        prop_assert!(a.interference_power.iter().all(|v| *v >= 0.0));
        prop_assert!((a.sum_rate - a.rates.iter().sum::<f64>()).abs() < 1e-12);
    }
}
