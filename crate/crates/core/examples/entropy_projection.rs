//! Project a positive vector onto the probability simplex under the
//! entropy geometry. The Bregman projection for this pairing is plain
//! renormalization, which makes the output easy to eyeball.

use bregkit::sets::{bregman_project, ConvexSet};
use bregkit::{Geometry, Point};

fn main() -> bregkit::Result<()> {
    let f = Geometry::neg_entropy(3);
    let simplex = ConvexSet::simplex(1.0)?;

    let x = Point::new(vec![0.2, 1.0, 0.4]);
    let proj = bregman_project(&f, &simplex, &x, 1e-12)?;

    println!("x            = {:?}", x.coords());
    println!("proj         = {:?}", proj.point.coords());
    println!("D_f(proj, x) = {:.6e}", f.bregman_distance(&proj.point, &x)?);

    let sum: f64 = x.coords().iter().sum();
    for (got, want) in proj.point.coords().iter().zip(x.coords()) {
        assert!((got - want / sum).abs() < 1e-12);
    }
    Ok(())
}
