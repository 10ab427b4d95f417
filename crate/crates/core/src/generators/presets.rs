//! Named morphisms used throughout the library and the CLI. Images are listed
//! row by row, bottom row first.

use super::morphism::Morphism;

fn m2(rows0: &[&[u32]], rows1: &[&[u32]]) -> Morphism {
    Morphism::from_rows(2, &[rows0, rows1]).expect("preset morphism is well formed")
}

/// Size (3,2) morphism whose third iterate on 1 is the 27x8 preimage figure.
pub fn preimage_3x2() -> Morphism {
    m2(&[&[0, 1, 1], &[1, 1, 0]], &[&[1, 1, 0], &[1, 0, 1]])
}

/// 0 ↦ zeros, 1 ↦ [1 0 / 1 1]: Pascal's triangle modulo 2.
pub fn sierpinski() -> Morphism {
    m2(&[&[0, 0], &[0, 0]], &[&[1, 1], &[1, 0]])
}

/// Size-3 morphism whose fixed point is SSURDO; the two images differ only
/// in the top-right cell.
pub fn ssurdo_3x3() -> Morphism {
    m2(
        &[&[1, 0, 0], &[1, 0, 1], &[1, 0, 0]],
        &[&[1, 0, 0], &[1, 0, 1], &[1, 0, 1]],
    )
}

/// 0 ↦ ones, 1 ↦ [0 0 / 1 0]. SURD but not SSURDO.
pub fn surd_not_ssurdo_2x2() -> Morphism {
    m2(&[&[1, 1], &[1, 1]], &[&[1, 0], &[0, 0]])
}

/// Fixed point on 1 reads 10^ω along (1,3).
pub fn suffnotnec_3x3() -> Morphism {
    m2(
        &[&[0, 0, 1], &[0, 0, 0], &[1, 1, 0]],
        &[&[1, 1, 0], &[0, 1, 0], &[1, 1, 1]],
    )
}

/// ψ of size 3 whose square satisfies the common-position condition while ψ
/// itself does not.
pub fn power_3x3() -> Morphism {
    m2(
        &[&[0, 1, 0], &[1, 1, 1], &[0, 0, 0]],
        &[&[1, 1, 0], &[1, 0, 1], &[0, 1, 0]],
    )
}

/// Both images start with 1: 0 ↦ [0 0 / 1 0], 1 ↦ [0 1 / 1 0].
pub fn cor1_example() -> Morphism {
    m2(&[&[1, 0], &[0, 0]], &[&[1, 0], &[0, 1]])
}

/// 2-D binary morphism of prime size s with a full column of 1s at abscissa
/// `i1` in both images and a full first column of 1s in the image of 1.
pub fn hyperplane_psi(s: u64, i1: u64) -> Morphism {
    let row0: Vec<u32> = (0..s).map(|x| u32::from(x == i1)).collect();
    let row1: Vec<u32> = (0..s).map(|x| u32::from(x == i1 || x == 0)).collect();
    let r0: Vec<&[u32]> = (0..s).map(|_| row0.as_slice()).collect();
    let r1: Vec<&[u32]> = (0..s).map(|_| row1.as_slice()).collect();
    m2(&r0, &r1)
}

/// The 1-D morphism read along any direction of [`hyperplane_psi`].
pub fn hyperplane_sigma(s: u64, i1: u64) -> Morphism {
    let w0: Vec<u32> = (0..s).map(|x| u32::from(x == i1)).collect();
    let w1: Vec<u32> = (0..s).map(|x| u32::from(x == i1 || x == 0)).collect();
    Morphism::from_words(2, &[&w0, &w1]).expect("well formed")
}

/// Size-6 morphism with 1s at the marked positions (0,4), (2,4), (3,3),
/// (2,2), (4,0) of both images, 0 elsewhere, except a 1 at the origin of the
/// image of 1 so that it is prolongable.
pub fn marked_s6() -> Morphism {
    let marks = [(0u64, 4u64), (2, 4), (3, 3), (2, 2), (4, 0)];
    let img = |b: u32| -> Vec<Vec<u32>> {
        (0..6u64)
            .map(|y| {
                (0..6u64)
                    .map(|x| u32::from(marks.contains(&(x, y)) || (b == 1 && x == 0 && y == 0)))
                    .collect()
            })
            .collect()
    };
    let i0 = img(0);
    let i1 = img(1);
    let r0: Vec<&[u32]> = i0.iter().map(|r| r.as_slice()).collect();
    let r1: Vec<&[u32]> = i1.iter().map(|r| r.as_slice()).collect();
    m2(&r0, &r1)
}

/// 0 ↦ 01, 1 ↦ 10.
pub fn thue_morse_1d() -> Morphism {
    Morphism::from_words(2, &[&[0, 1], &[1, 0]]).expect("well formed")
}

/// Preset morphism by CLI name.
pub fn by_name(name: &str) -> Option<Morphism> {
    Some(match name {
        "preimage-3x2" => preimage_3x2(),
        "sierpinski" => sierpinski(),
        "ssurdo-3x3" => ssurdo_3x3(),
        "surd-not-ssurdo-2x2" => surd_not_ssurdo_2x2(),
        "suffnotnec-3x3" => suffnotnec_3x3(),
        "power-3x3" => power_3x3(),
        "cor1-example" => cor1_example(),
        "marked-6x6" => marked_s6(),
        _ => return None,
    })
}

pub const NAMES: &[&str] = &[
    "preimage-3x2",
    "sierpinski",
    "ssurdo-3x3",
    "surd-not-ssurdo-2x2",
    "suffnotnec-3x3",
    "power-3x3",
    "cor1-example",
    "marked-6x6",
];
