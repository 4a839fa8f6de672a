use lorentz_comparison::distance::ShootingOptions;
use lorentz_comparison::model::{build_profile, ModelParams};
use lorentz_comparison::spacetime::{Hypersurface, Spacetime};
use nalgebra::DVector;
fn main() {
    let p = build_profile(ModelParams { kappa: 1.0, beta: 0.0, n: 2 }).unwrap();
    let st = Spacetime::from_profile(&p).unwrap();
    let sigma = Hypersurface::Slice(0.0);
    let opts = ShootingOptions::default();
    let ray = st.sigma_ray(&sigma, &DVector::zeros(1), &opts).unwrap();
    println!("ray a = {}, span = {}", ray.a, ray.trace.span());
    let schedule = st.busemann_schedule(&ray, 0.3, 8);
    println!("schedule: {schedule:?}");
    let x = ray.point(0.5);
    println!("x = ({}, {:?})", x.t, x.x.as_slice());
    let b = st.busemann(&x, &ray, &schedule, &opts).unwrap();
    for (r, v) in &b.truncations {
        println!("r = {r:.9}: truncation = {v:.9}");
    }
}
