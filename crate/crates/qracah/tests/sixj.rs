use num_rational::BigRational;
use qracah::sixj::{
    admissible_symbols, classical_sixj_squared, closed_form_parts, outer_tuples, parts, racah_coefficient_u, sixj_squared_exact,
    sixj_symmetry_residual, sixj_value, ClosedForm, Outer, Recurrence, RecurrenceSweep, Route, SixJ, SixJGrid,
};
use qracah::{ExactField, FloatField, FloatScalar, Rat, Scalar};

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn fields() -> Vec<FloatField> {
    [r(1, 2), r(9, 10), r(3, 2)].into_iter().map(|q| FloatField::new(q, 128).unwrap()).collect()
}

fn rel(a: &FloatScalar, b: &FloatScalar) -> f64 {
    let d = (a.clone() - b).abs().to_f64();
    if d == 0.0 {
        return 0.0;
    }
    d / a.abs().to_f64().max(b.abs().to_f64())
}

#[test]
fn enumeration() {
    let all = admissible_symbols(r(4, 1));
    assert!(all.len() > 300, "{}", all.len());
    for sj in &all {
        sj.check().unwrap();
    }
    let one: Vec<_> = admissible_symbols(r(1, 2));
    assert!(one.contains(&SixJ::from_doubled([1, 1, 0, 1, 1, 0]).unwrap()));
    for o in outer_tuples(r(2, 1)) {
        assert_eq!(o.symbols().len(), o.j12_range().len() * o.j23_range().len());
    }
}

#[test]
fn routes_agree() {
    let syms = admissible_symbols(r(3, 1));
    for f in fields() {
        for sj in &syms {
            let base = sixj_value(&f, sj, Route::ViaU).unwrap();
            for route in [Route::ViaUTilde, Route::Explicit, Route::ExplicitTilde] {
                let v = sixj_value(&f, sj, route).unwrap();
                assert!(rel(&v, &base) < 1e-25, "{sj} {route:?} q={}", f.q());
            }
        }
    }
}

#[test]
fn closed_forms() {
    let syms = admissible_symbols(r(3, 1));
    for f in fields() {
        for sj in &syms {
            let base = sixj_value(&f, sj, Route::Explicit).unwrap();
            for form in ClosedForm::ALL {
                if !form.applies(sj) {
                    assert!(closed_form_parts(&f, sj, form).is_err());
                    continue;
                }
                let v = closed_form_parts(&f, sj, form).unwrap().value().unwrap();
                assert!(rel(&v, &base) < 1e-25, "{sj} {form:?}: {} vs {}", v.to_f64(), base.to_f64());
            }
        }
    }
}

#[test]
fn exact_squares() {
    let fe = ExactField::new();
    for sj in admissible_symbols(r(2, 1)) {
        for f in fields() {
            let (sq, sign) = sixj_squared_exact(&sj, Route::ExplicitTilde, &f).unwrap();
            let v = sixj_value(&f, &sj, Route::ViaU).unwrap();
            let s = sq.eval_float(&f).unwrap();
            assert!(rel(&s, &(v.clone() * &v)) < 1e-25, "{sj}");
            let expect = if v.is_zero() {
                0
            } else if v.is_negative() {
                -1
            } else {
                1
            };
            assert_eq!(sign, expect, "{sj}");
        }
        let a = parts(&fe, &sj, Route::ViaU).unwrap().square();
        let b = parts(&fe, &sj, Route::Explicit).unwrap().square();
        assert!((a - &b).is_zero(), "{sj}");
    }
}

#[test]
fn classical_limit() {
    let near = FloatField::new(r(1_000_001, 1_000_000), 128).unwrap();
    for sj in admissible_symbols(r(5, 2)) {
        let (sq, sign) = classical_sixj_squared(&sj);
        let p = parts(&ExactField::new(), &sj, Route::Explicit).unwrap();
        assert_eq!(p.square().eval_at_unity().unwrap(), sq, "{sj}");
        let v = sixj_value(&near, &sj, Route::ViaUTilde).unwrap().to_f64();
        let c = sign as f64 * qracah_sqrt(&sq);
        assert!((v - c).abs() < 1e-4 * c.abs().max(1e-3), "{sj}: {v} vs {c}");
    }
}

fn qracah_sqrt(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap().sqrt()
}

#[test]
fn unitarity_and_symmetry() {
    for f in fields() {
        for o in outer_tuples(r(3, 1)) {
            let g = SixJGrid::new(&f, o, Route::Explicit).unwrap();
            let (a, b) = g.unitarity_deviation(&f).unwrap();
            assert!(a < 1e-25 && b < 1e-25, "{o:?}: {a} {b}");
        }
        for sj in admissible_symbols(r(3, 1)) {
            let sw = sj.swapped();
            if sw.check().is_err() {
                continue;
            }
            let d = sixj_symmetry_residual(&f, &sj, Route::ViaU).unwrap().abs().to_f64();
            assert!(d < 1e-25 * sixj_value(&f, &sj, Route::ViaU).unwrap().abs().to_f64().max(1e-5), "{sj}");
        }
        let sj = SixJ::from_doubled([3, 1, 2, 3, 3, 4]).unwrap();
        let u = racah_coefficient_u(&f, &sj, Route::ViaU).unwrap();
        assert!(u.abs().to_f64() <= 1.0 + 1e-25);
    }
}

#[test]
fn recurrences() {
    let mut checked = std::collections::HashMap::new();
    for f in fields() {
        for o in outer_tuples(r(3, 1)) {
            let sweep = RecurrenceSweep::new(&f, o, Route::ViaU).unwrap();
            for sj in o.symbols() {
                for rec in Recurrence::ALL {
                    if let Some(res) = sweep.residual(rec, sj.j12, sj.j23).unwrap() {
                        assert!(res.relative() < 1e-25, "{rec:?} {sj} q={}: {:?}", f.q(), res);
                        *checked.entry(rec).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    for rec in Recurrence::ALL {
        assert!(checked.get(&rec).copied().unwrap_or(0) > 20, "{rec:?} hardly exercised");
    }
}

#[test]
fn a_identities() {
    let fe = ExactField::new();
    for sj in admissible_symbols(r(5, 2)) {
        let [am, sm, ap, sp] = RecurrenceSweep::a_identity(&fe, &sj).unwrap();
        assert!((am - &sm).is_zero(), "{sj}");
        assert!((ap - &sp).is_zero(), "{sj}");
    }
}

#[test]
fn rejects_inadmissible() {
    assert!(SixJ::from_doubled([1, 3, 2, 3, 1, 2]).is_err());
    assert!(SixJ::from_doubled([2, 2, 2, 2, 2, 3]).is_err());
    let o = Outer { j1: r(1, 1), j2: r(1, 2), j3: r(1, 1), j: r(1, 1) };
    assert!(o.symbol(r(5, 2), r(1, 1)).is_err());
}
