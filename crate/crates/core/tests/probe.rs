// temporary probe of the transported model geometry
use discflow::catalog;
use discflow::koenigs::{disc_koenigs_from_model, phs_halfplane_map, pommerenke_koenigs};
use discflow::map::{DomainTag, Holomorphic, MapDescriptor};
use discflow::util::disc_grid;
use num_complex::Complex64;
use std::sync::Arc;

fn c(re: f64, im: f64) -> Complex64 { Complex64::new(re, im) }

#[test]
fn probe_model_geometry() {
    let phi = catalog::build("phs-halfplane").unwrap().principal_map().unwrap();
    let f = phs_halfplane_map();
    let model = Arc::new(pommerenke_koenigs(&f, c(1.0, 0.0), 50_000).unwrap());
    println!("b = {}, n_used = {}, residual = {:.3e}", model.b, model.n_used, model.residual);
    let (k_disc, base_upper) = disc_koenigs_from_model(model, c(1.0, 0.0)).unwrap();
    println!("base_upper = {base_upper}");
    let mut min_abs_im = f64::INFINITY;
    let mut worst = c(0.0,0.0);
    for z in disc_grid(128, 0.9) {
        let w = k_disc.eval(z).unwrap();
        if w.im.abs() < min_abs_im { min_abs_im = w.im.abs(); worst = z; }
        let pz = phi.eval(z).unwrap();
        let wp = k_disc.eval(pz).unwrap();
        if wp.im.abs() < min_abs_im { min_abs_im = wp.im.abs(); worst = pz; }
    }
    println!("min |Im h| over grid+images = {min_abs_im:.4} at z = {worst}");
    // try the psi evaluation over the grid with E = exp(-2 pi i w)
    let two_pi = 2.0 * std::f64::consts::PI;
    let g = MapDescriptor::parse_formula(&format!("z + 1 + 0.05*exp(-{two_pi}*i*z)"), DomainTag::LowerHalfPlane).unwrap();
    let psi = MapDescriptor::ModelConjugate { koenigs: Arc::new(k_disc), model_map: Arc::new(g) };
    let mut fails = 0; let mut worst_comm: f64 = 0.0;
    for z in disc_grid(128, 0.9) {
        match (psi.eval(z), phi.eval(z)) {
            (Ok(pz), Ok(fz)) => {
                match (phi.eval(pz), psi.eval(fz)) {
                    (Ok(a), Ok(b)) => { worst_comm = worst_comm.max((a-b).norm()); }
                    _ => { fails += 1; println!("second-stage fail at {z}"); }
                }
            }
            (r1, _) => { fails += 1; println!("first-stage fail at {z}: psi: {:?}", r1.err()); }
        }
    }
    println!("fails = {fails}, worst commutator = {worst_comm:.3e}");
}
