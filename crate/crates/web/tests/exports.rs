use metricdim_web::{ball_growth_json, discretize_plane_json, distortion_curve_json};

#[test]
fn ball_growth_reports_profile() {
    let v = ball_growth_json(2000, 40, 1, 7, 12).unwrap();
    let ball = v["ball"].as_array().unwrap();
    assert_eq!(ball[0], 1);
    assert_eq!(ball.len(), 13);
    for (b, bound) in ball.iter().zip(v["ball_bound"].as_array().unwrap()) {
        assert!(b.as_u64().unwrap() <= bound.as_u64().unwrap());
    }
    assert!(v["inclusions"]["h1"].is_null());
    assert!(ball_growth_json(10, 2, 1, 11, 3).is_err());
}

#[test]
fn plane_discretization_is_deterministic() {
    let a = discretize_plane_json(150, "lp:2", 1.0, 500.0, 4.0, 0.05, 9).unwrap();
    let b = discretize_plane_json(150, "lp:2", 1.0, 500.0, 4.0, 0.05, 9).unwrap();
    assert_eq!(a, b);
    assert_eq!(a["discretized"].as_array().unwrap().len(), 150);
    assert_eq!(a["checks"]["remark_violations"], 0);
    assert_eq!(a["checks"]["expansion_violations"], 0);
    assert!(discretize_plane_json(150, "lp:0.5", 1.0, 500.0, 4.0, 0.05, 9).is_err());
}

#[test]
fn distortion_curve_is_monotone() {
    let v = distortion_curve_json(24, 3, 2, 4, 300).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let search: Vec<f64> = rows.iter().map(|r| r["search"].as_f64().unwrap()).collect();
    assert!(search.windows(2).all(|w| w[1] <= w[0]));
    assert!(search.iter().all(|&a| a >= 1.0));
}
