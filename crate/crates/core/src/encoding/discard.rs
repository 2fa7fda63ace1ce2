//! Keep-four discard abstraction: the discarding player names four cards
//! to keep; any further survivors are drawn at random from the rest.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;

use super::EncodingError;
use crate::engine::types::{Hand, Resource};

pub const NUM_KEEP_ACTIONS: usize = 70;

/// All size-4 multisets over the five resources, ordered lexicographically
/// as sorted card sequences: `(4,0,0,0,0)` first, `(0,0,0,0,4)` last.
pub fn discard_keep_actions() -> &'static [Hand; NUM_KEEP_ACTIONS] {
    static KEEPS: OnceLock<[Hand; NUM_KEEP_ACTIONS]> = OnceLock::new();
    KEEPS.get_or_init(|| {
        let mut out = Vec::with_capacity(NUM_KEEP_ACTIONS);
        for a in 0..5 {
            for b in a..5 {
                for c in b..5 {
                    for d in c..5 {
                        let mut h = Hand::EMPTY;
                        for card in [a, b, c, d] {
                            h.0[card] += 1;
                        }
                        out.push(h);
                    }
                }
            }
        }
        out.try_into().expect("C(8,4) = 70 keep multisets")
    })
}

/// Slot of a keep multiset in [`discard_keep_actions`].
pub fn keep_index(keep: &Hand) -> Option<usize> {
    discard_keep_actions().iter().position(|k| k == keep)
}

/// Size of the unabstracted discard action space: every per-resource
/// count vector in 0..=19 whose total lies in 3..=47, by enumeration.
pub fn raw_discard_action_count() -> u64 {
    let mut n = 0;
    for b in 0..=19u32 {
        for l in 0..=19 {
            for o in 0..=19 {
                for g in 0..=19 {
                    for w in 0..=19 {
                        let s = b + l + o + g + w;
                        if (3..=47).contains(&s) {
                            n += 1;
                        }
                    }
                }
            }
        }
    }
    n
}

/// Cards thrown away when `hand` keeps `keep4` plus `keep_count - 4`
/// uniformly drawn extra cards.
pub fn resolve_discard<R: Rng + ?Sized>(
    hand: &Hand,
    keep4: &Hand,
    keep_count: u8,
    rng: &mut R,
) -> Result<Hand, EncodingError> {
    if !hand.contains(keep4) || keep4.total() != 4 {
        return Err(EncodingError::KeepNotInHand {
            hand: *hand,
            keep: *keep4,
        });
    }
    let keep_count = u32::from(keep_count);
    debug_assert!(keep_count >= 4 && keep_count <= hand.total());
    let mut rest = *hand;
    rest.remove(keep4);
    let mut cards: Vec<Resource> = Resource::ALL
        .iter()
        .flat_map(|&r| std::iter::repeat_n(r, rest[r] as usize))
        .collect();
    let extra = keep_count.saturating_sub(4) as usize;
    let (survivors, _) = cards.partial_shuffle(rng, extra);
    for &r in survivors.iter() {
        rest[r] -= 1;
    }
    Ok(rest)
}
