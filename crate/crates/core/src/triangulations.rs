//! Small standard triangulations used as fixtures and in examples.

use crate::complex::SimplicialComplex;

const TORUS7: [[usize; 3]; 14] = [
    [0, 1, 3],
    [0, 1, 5],
    [0, 2, 3],
    [0, 2, 6],
    [0, 4, 5],
    [0, 4, 6],
    [1, 2, 4],
    [1, 2, 6],
    [1, 3, 4],
    [1, 5, 6],
    [2, 3, 5],
    [2, 4, 5],
    [3, 4, 6],
    [3, 5, 6],
];

const RP2_6: [[usize; 3]; 10] = [
    [0, 1, 3],
    [0, 1, 5],
    [0, 2, 4],
    [0, 2, 5],
    [0, 3, 4],
    [1, 2, 3],
    [1, 2, 4],
    [1, 4, 5],
    [2, 3, 5],
    [3, 4, 5],
];

const KLEIN8: [[usize; 3]; 16] = [
    [0, 1, 2],
    [0, 1, 3],
    [0, 2, 4],
    [0, 3, 4],
    [1, 2, 5],
    [1, 3, 6],
    [1, 4, 5],
    [1, 4, 6],
    [2, 4, 6],
    [2, 3, 5],
    [2, 3, 7],
    [2, 6, 7],
    [3, 4, 7],
    [3, 5, 6],
    [4, 5, 7],
    [5, 6, 7],
];

fn build(faces: &[Vec<usize>]) -> SimplicialComplex {
    SimplicialComplex::from_simplices(faces).expect("fixture is a valid complex")
}

fn rows<const N: usize>(faces: &[[usize; N]]) -> Vec<Vec<usize>> {
    faces.iter().map(|f| f.to_vec()).collect()
}

/// Boundary of the 3-simplex, a 2-sphere.
pub fn tetrahedron_boundary() -> SimplicialComplex {
    build(&[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]])
}

/// The 7-vertex (Möbius–Kantor) torus.
pub fn torus7() -> SimplicialComplex {
    build(&rows(&TORUS7))
}

/// The 6-vertex real projective plane.
pub fn rp2_6() -> SimplicialComplex {
    build(&rows(&RP2_6))
}

/// An 8-vertex Klein bottle.
pub fn klein8() -> SimplicialComplex {
    build(&rows(&KLEIN8))
}

/// Genus-2 surface: two copies of the 7-vertex torus with the triangle
/// {0,1,3} removed, glued along its boundary. 11 vertices, 26 triangles.
pub fn genus2() -> SimplicialComplex {
    let second = |v: usize| match v {
        0 => 0,
        1 => 1,
        3 => 3,
        2 => 7,
        4 => 8,
        5 => 9,
        6 => 10,
        _ => unreachable!(),
    };
    let mut faces = Vec::new();
    for f in TORUS7.iter().filter(|f| **f != [0, 1, 3]) {
        faces.push(f.to_vec());
        faces.push(f.iter().map(|&v| second(v)).collect());
    }
    build(&faces)
}

/// Cycle graph on `n ≥ 3` vertices.
pub fn cycle(n: usize) -> SimplicialComplex {
    assert!(n >= 3);
    build(&(0..n).map(|i| vec![i, (i + 1) % n]).collect::<Vec<_>>())
}

/// A single triangle (2-disc).
pub fn triangle() -> SimplicialComplex {
    build(&[vec![0, 1, 2]])
}

/// Two triangles sharing the edge {1,2}.
pub fn two_triangle_disc() -> SimplicialComplex {
    build(&[vec![0, 1, 2], vec![1, 2, 3]])
}

/// Named closed-surface fixtures.
pub fn surface_fixtures() -> Vec<(&'static str, SimplicialComplex)> {
    vec![
        ("sphere", tetrahedron_boundary()),
        ("torus", torus7()),
        ("rp2", rp2_6()),
        ("klein", klein8()),
        ("genus2", genus2()),
    ]
}
