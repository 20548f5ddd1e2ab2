//! Named URs and formulas used throughout the tests, the corpus and the CLI
//! examples.

use std::sync::Arc;

use crate::syntax::{parse_uformula, Formula};
use crate::ur::Ur;

/// "Every man loves a woman."
pub const EVERY_MAN: &str = "ur { l0: #0 ; l1: forall x. (man(x) -> #1) ; l2: exists y. (woman(y) & #2) ; l3: love(x,y) ; constraints { l1 <= #0 ; l2 <= #0 ; l3 <= #1 ; l3 <= #2 } }";
pub const WEAK_READING: &str = "forall x. (man(x) -> exists y. (woman(y) & love(x,y)))";
pub const STRONG_READING: &str = "exists y. (woman(y) & forall x. (man(x) -> love(x,y)))";

/// "Every boy doesn't see a movie."
pub const BOY_MOVIE: &str = "ur { l0: #0 ; l1: forall x. (boy(x) -> #1) ; l2: ~#2 ; l3: exists y. (movie(y) & #3) ; l4: see(x,y) ; constraints { l1 <= #0 ; l2 <= #0 ; l3 <= #0 ; l4 <= #1 ; l4 <= #2 ; l4 <= #3 } }";

/// Readings of [`BOY_MOVIE`] in which the universal outscopes the negation.
pub const BOY_MOVIE_UNIVERSAL_OVER_NEGATION: [&str; 3] = [
    "exists y. (movie(y) & forall x. (boy(x) -> ~see(x,y)))",
    "forall x. (boy(x) -> ~exists y. (movie(y) & see(x,y)))",
    "forall x. (boy(x) -> exists y. (movie(y) & ~see(x,y)))",
];

/// "Every man who doesn't have a car rides a bike."
pub const MAN_CAR_BIKE: &str = "ur { l0: #0 ; l1: forall x. (man(x) & #1 -> #2) ; l2: exists y. (car(y) & #3) ; l3: exists z. (bike(z) & #4) ; l4: ~#5 ; l5: have(x,y) ; l6: ride(x,z) ; constraints { l1 <= #0 ; l2 <= #0 ; l3 <= #0 ; l4 <= #1 ; l5 <= #5 ; l5 <= #3 ; l6 <= #2 ; l6 <= #4 } }";

/// A UR whose two readings, `~exists y. (r(y) & s(y))` and
/// `exists y. (r(y) & ~s(y))`, are logically independent.
pub const INDEPENDENT: &str =
    "ur { l0: #0 ; l1: ~#1 ; l2: exists y. (r(y) & #2) ; l3: s(y) ; constraints { l1 <= #0 ; l2 <= #0 ; l3 <= #1 ; l3 <= #2 } }";

fn ur_of(text: &str) -> Arc<Ur> {
    match parse_uformula(text) {
        Ok(Formula::Ur(u)) => u,
        other => panic!("fixture is not a single UR: {other:?}"),
    }
}

pub fn every_man_ur() -> Arc<Ur> {
    ur_of(EVERY_MAN)
}

pub fn every_man() -> Formula {
    Formula::Ur(every_man_ur())
}

pub fn boy_movie_ur() -> Arc<Ur> {
    ur_of(BOY_MOVIE)
}

pub fn boy_movie() -> Formula {
    Formula::Ur(boy_movie_ur())
}

pub fn man_car_bike_ur() -> Arc<Ur> {
    ur_of(MAN_CAR_BIKE)
}

pub fn independent_ur() -> Arc<Ur> {
    ur_of(INDEPENDENT)
}

pub fn independent() -> Formula {
    Formula::Ur(independent_ur())
}
