use nalgebra::DVector;
use polarlab::quotient::crossing_number;
use polarlab::{Preset, ToleranceProfile};
use proptest::prelude::*;

fn vec4() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn leaf_dimension_is_scale_invariant(x in vec4(), lambda in 0.05f64..20.0) {
        let p = ToleranceProfile::default();
        for preset in [Preset::TorusStd(2), Preset::Hopf, Preset::So(4)] {
            let a = preset.action().unwrap();
            let x = DVector::from_vec(x.clone());
            prop_assert_eq!(a.leaf_dimension(&x, &p).unwrap(), a.leaf_dimension(&(&x * lambda), &p).unwrap());
        }
    }

    #[test]
    fn torus_crossing_is_reparametrization_invariant(y in vec4(), v in vec4(), lambda in 0.3f64..4.0) {
        let p = ToleranceProfile::default();
        let a = Preset::TorusStd(2).action().unwrap();
        let v = DVector::from_vec(v);
        prop_assume!(v.norm() > 0.2);
        let Ok(g) = a.make_horizontal_geodesic(&DVector::from_vec(y), &v, (-1.0, 1.0)) else { return Ok(()) };
        let Ok(r) = crossing_number(&a, &g, &p) else { return Ok(()) };
        prop_assert_eq!(r.total, r.vertical_index);
        prop_assert_eq!(crossing_number(&a, &g.reversed(), &p).unwrap().total, r.total);
        prop_assert_eq!(crossing_number(&a, &g.reparametrized(lambda).unwrap(), &p).unwrap().total, r.total);
    }
}
