//! Mittag-Leffler values against 30+ digit references.
//!
//! References come from `tests/oracle/ml_reference.py` (mpmath power series at a
//! working precision sized to the largest term), so they are independent of every
//! evaluation regime used by the crate.

use frac_rabi::ml::MlConfig;
use num_complex::Complex64 as C64;

// (alpha, beta, z_re, z_im, value_re, value_im)
const ML_REFERENCE: &[(f64, f64, f64, f64, f64, f64)] = &[
    (0.3, 1.0, 0.0, 0.5, 0.768775494900599, 0.4475234400900927),
    (0.3, 1.0, 0.0, -0.5, 0.768775494900599, -0.4475234400900927),
    (0.3, 1.0, 0.0, 3.0, 0.051918367383206696, 0.25171686755542566),
    (0.3, 1.0, 0.0, -3.0, 0.051918367383206696, -0.25171686755542566),
    (0.3, 1.0, 0.0, 8.0, 0.007085381250557779, 0.09608394289653914),
    (0.3, 1.0, 0.0, -8.0, 0.007085381250557779, -0.09608394289653914),
    (0.3, 0.3, 0.0, 0.5, 0.15812707687185074, 0.2277341428483149),
    (0.3, 0.3, 0.0, -0.5, 0.15812707687185074, -0.2277341428483149),
    (0.3, 0.3, 0.0, 3.0, -0.023919789747938097, 0.010680159575258715),
    (0.3, 0.3, 0.0, -3.0, -0.023919789747938097, -0.010680159575258715),
    (0.3, 0.3, 0.0, 8.0, -0.0035864488914099705, 0.0005344443659392239),
    (0.3, 0.3, 0.0, -8.0, -0.0035864488914099705, -0.0005344443659392239),
    (0.5, 1.0, 0.0, 0.5, 0.7788007830714049, 0.47892517290104347),
    (0.5, 1.0, 0.0, -0.5, 0.7788007830714049, -0.47892517290104347),
    (0.5, 1.0, 0.0, 3.0, 0.00012340980408667956, 0.2011573170376004),
    (0.5, 1.0, 0.0, -3.0, 0.00012340980408667956, -0.2011573170376004),
    (0.5, 1.0, 0.0, 8.0, 1.6038109062524e-28, 0.07108811174448088),
    (0.5, 1.0, 0.0, -8.0, 1.6038109062524e-28, -0.07108811174448088),
    (0.5, 1.0, 0.0, 15.0, 2.230912530190767e-36, 0.03769678605913683),
    (0.5, 1.0, 0.0, -15.0, 2.230912530190767e-36, -0.03769678605913683),
    (0.5, 1.0, 0.0, 40.0, 2.8952382293487893e-36, 0.014109151458534102),
    (0.5, 1.0, 0.0, -40.0, 2.8952382293487893e-36, -0.014109151458534102),
    (0.5, 0.5, 0.0, 0.5, 0.32472699709723457, 0.38940039153570244),
    (0.5, 0.5, 0.0, -0.5, 0.32472699709723457, -0.38940039153570244),
    (0.5, 0.5, 0.0, 3.0, -0.03928236756504487, 0.00037022941226003863),
    (0.5, 0.5, 0.0, -3.0, -0.03928236756504487, -0.00037022941226003863),
    (0.5, 0.5, 0.0, 8.0, -0.00451531040809075, 1.2830487091136003e-27),
    (0.5, 0.5, 0.0, -8.0, -0.00451531040809075, -1.2830487091136003e-27),
    (0.5, 0.5, 0.0, 15.0, -0.001262207339296212, 3.5972517573484066e-36),
    (0.5, 0.5, 0.0, -15.0, -0.001262207339296212, -3.5972517573484066e-36),
    (0.5, 0.5, 0.0, 40.0, -0.00017647479360777444, 1.9755982864620706e-36),
    (0.5, 0.5, 0.0, -40.0, -0.00017647479360777444, -1.9755982864620706e-36),
    (0.7, 1.0, 0.0, 0.5, 0.8115850969869528, 0.4960049801371615),
    (0.7, 1.0, 0.0, -0.5, 0.8115850969869528, -0.4960049801371615),
    (0.7, 1.0, 0.0, 3.0, -0.08937880859597541, 0.0631562487093518),
    (0.7, 1.0, 0.0, -3.0, -0.08937880859597541, -0.0631562487093518),
    (0.7, 1.0, 0.0, 8.0, -0.00427359364209083, 0.04155355847836626),
    (0.7, 1.0, 0.0, -8.0, -0.00427359364209083, -0.04155355847836626),
    (0.7, 1.0, 0.0, 15.0, -0.0011998478741585513, 0.022252947188422648),
    (0.7, 1.0, 0.0, -15.0, -0.0011998478741585513, -0.022252947188422648),
    (0.7, 1.0, 0.0, 40.0, -0.00016799841245321203, 0.00835520010160043),
    (0.7, 1.0, 0.0, -40.0, -0.00016799841245321203, -0.00835520010160043),
    (0.7, 0.7, 0.0, 0.5, 0.5495577151519488, 0.4928742735432559),
    (0.7, 0.7, 0.0, -0.5, 0.5495577151519488, -0.4928742735432559),
    (0.7, 0.7, 0.0, 3.0, -0.05225721852031605, -0.12385987582774617),
    (0.7, 0.7, 0.0, -3.0, -0.05225721852031605, 0.12385987582774617),
    (0.7, 0.7, 0.0, 8.0, -0.003606785267483082, -0.0007615082797064172),
    (0.7, 0.7, 0.0, -8.0, -0.003606785267483082, 0.0007615082797064172),
    (0.7, 0.7, 0.0, 15.0, -0.0010353614243167467, -0.00011253828055015155),
    (0.7, 0.7, 0.0, -15.0, -0.0010353614243167467, 0.00011253828055015155),
    (0.7, 0.7, 0.0, 40.0, -0.0001461589844211628, -5.884207762947215e-06),
    (0.7, 0.7, 0.0, -40.0, -0.0001461589844211628, 5.884207762947215e-06),
    (0.9, 1.0, 0.0, 0.5, 0.8554853269063468, 0.4904966528417247),
    (0.9, 1.0, 0.0, -0.5, 0.8554853269063468, -0.4904966528417247),
    (0.9, 1.0, 0.0, 3.0, -0.6175809349533969, -0.09355857391540587),
    (0.9, 1.0, 0.0, -3.0, -0.6175809349533969, 0.09355857391540587),
    (0.9, 1.0, 0.0, 8.0, -0.1717549425899951, -0.08033642755065806),
    (0.9, 1.0, 0.0, -8.0, -0.1717549425899951, 0.08033642755065806),
    (0.9, 1.0, 0.0, 15.0, 0.013925608899103523, 0.03635608762012783),
    (0.9, 1.0, 0.0, -15.0, 0.013925608899103523, -0.03635608762012783),
    (0.9, 1.0, 0.0, 40.0, -0.00013834332912454698, 0.002632248823865453),
    (0.9, 1.0, 0.0, -40.0, -0.00013834332912454698, -0.002632248823865453),
    (0.9, 0.9, 0.0, 0.5, 0.7792299550828193, 0.5038998826487268),
    (0.9, 0.9, 0.0, -0.5, 0.7792299550828193, -0.5038998826487268),
    (0.9, 0.9, 0.0, 3.0, -0.6544496660548933, -0.2580044494331035),
    (0.9, 0.9, 0.0, -3.0, -0.6544496660548933, 0.2580044494331035),
    (0.9, 0.9, 0.0, 8.0, -0.19098444107251553, -0.15268168033102184),
    (0.9, 0.9, 0.0, -8.0, -0.19098444107251553, 0.15268168033102184),
    (0.9, 0.9, 0.0, 15.0, 0.012218365244741724, 0.04255595198613034),
    (0.9, 0.9, 0.0, -15.0, 0.012218365244741724, -0.04255595198613034),
    (0.9, 0.9, 0.0, 40.0, -0.00010579559834724926, 3.0307640402934654e-06),
    (0.9, 0.9, 0.0, -40.0, -0.00010579559834724926, -3.0307640402934654e-06),
    (0.8, 0.8, -0.0, -2.0, -0.5252830337425884, -0.2895387756033318),
    (0.5, 1.0, 1.0, 0.0, 5.008980080762283, 0.0),
    (0.6, 1.0, -20.0, 0.0, 0.022946564273258377, 0.0),
    (0.6, 1.0, 3.0, 3.0, -7.564786772388495, -28.598045276799926),
    (0.6, 1.0, -6.0, 4.0, 0.05346764080609081, 0.03716992084763343),
    (0.9, 1.0, -30.0, 1.0, 0.0037090583416213305, 0.00013122441012648907),
    (0.4, 0.4, 2.0, -5.0, -0.007828413431082093, 0.006205699044218295),
    (0.7, 5.3, 0.0, 12.0, 0.001274513206773628, 0.005993162510201027),
    (0.5, 20.0, 0.0, 20.0, 3.736265701952192e-19, 1.7235643447536125e-18),
    (0.95, 1.0, 0.0, 25.0, -0.029799926510949384, -0.08424379633114835),
    (0.999, 1.0, 0.0, 30.0, 0.2428037696428558, -0.9233010656153944),
    (0.7, 0.7, 0.0, -60.0, -6.498072085995904e-05, 1.742066092062811e-06),
    (0.8, 1.0, 0.0, 100.0, -2.704491343406814e-05, 0.00217787279951825),
    (0.25, 1.25, 0.0, 2.5, 0.12282651736673772, 0.36433734728509026),
    (1.0, 2.0, 0.0, 7.0, 0.09385522838839844, 0.035156820808099336),
    (1.0, 0.5, -3.0, 2.0, -0.14437965863133673, -0.0958236981679183),
];

#[test]
fn matches_high_precision_references() {
    let cfg = MlConfig::default();
    let mut worst = 0.0f64;
    for &(a, b, zr, zi, vr, vi) in ML_REFERENCE {
        let want = C64::new(vr, vi);
        let e = cfg.eval(a, b, C64::new(zr, zi)).unwrap();
        let rel = (e.value - want).norm() / want.norm();
        println!("a={a} b={b} z={zr}{zi:+}i regime={} terms={} rel={rel:.2e}", e.regime, e.terms);
        assert!(rel < 1e-10, "a={a} b={b} z={zr}{zi:+}i: rel err {rel:e} via {}", e.regime);
        worst = worst.max(rel);
    }
    println!("worst relative error {worst:.2e}");
}
