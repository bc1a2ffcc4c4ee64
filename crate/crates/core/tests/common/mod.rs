#![allow(dead_code)]

/// Year column of the 22-row music sample, in catalogue order.
pub const YEARS: [Option<i64>; 22] = [
    Some(1992),
    Some(2012),
    Some(1996),
    Some(1995),
    Some(1999),
    Some(2000),
    Some(1999),
    Some(2001),
    Some(2002),
    Some(2000),
    Some(1998),
    Some(1997),
    Some(1996),
    Some(1994),
    Some(1982),
    Some(1987),
    Some(1989),
    None,
    Some(1991),
    Some(1990),
    Some(1991),
    Some(1992),
];

/// Rows 1-9 followed by rows 15-22.
pub fn two_series() -> Vec<Option<i64>> {
    YEARS[..9].iter().chain(&YEARS[14..]).copied().collect()
}

pub fn some(v: &[i64]) -> Vec<Option<i64>> {
    v.iter().copied().map(Some).collect()
}
