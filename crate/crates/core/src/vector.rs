//! Fixed-size vector helpers for points in indicator space.

/// Number of indicators per country.
pub const DIM: usize = 4;

pub type Point = [f64; DIM];

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    std::array::from_fn(|k| a[k] - b[k])
}

#[inline]
pub fn add_scaled(a: &Point, b: &Point, t: f64) -> Point {
    std::array::from_fn(|k| a[k] + t * b[k])
}

#[inline]
pub fn scale(a: &Point, t: f64) -> Point {
    std::array::from_fn(|k| a[k] * t)
}

#[inline]
pub fn norm_sq(a: &Point) -> f64 {
    dot(a, a)
}

#[inline]
pub fn dist_sq(a: &Point, b: &Point) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
