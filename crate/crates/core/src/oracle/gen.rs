//! Seeded random inputs: trivial-by-construction words and random circuits.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::PowerCircuit;
use crate::marking::{Marking, Sign};
use crate::tree::TreeRep;
use crate::word::{parse_baumslag, BGen, BaumslagWord, Generator, HGen, HigmanWord, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Baumslag,
    Higman,
}

impl std::str::FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "baumslag" => Ok(Group::Baumslag),
            "higman" => Ok(Group::Higman),
            _ => Err(format!("unknown group {s:?} (expected baumslag or higman)")),
        }
    }
}

/// Relators of the Baumslag group over `a, t, b`, including `t = b a b⁻¹`.
pub fn baumslag_relators() -> Vec<BaumslagWord> {
    ["baBabABA^2", "baBT", "taTA^2"]
        .iter()
        .map(|s| parse_baumslag(s).unwrap())
        .collect()
}

pub fn higman_relators() -> Vec<HigmanWord> {
    (1..=4).map(crate::higman::higman_relator).collect()
}

fn random_word<G: Generator>(rng: &mut ChaCha8Rng, alphabet: &[G], len: usize) -> Word<G> {
    let mut w = Word::new();
    while (w.len() as usize) < len {
        let g = *alphabet.choose(rng).unwrap();
        w.push(g, if rng.gen_bool(0.5) { 1 } else { -1 });
    }
    w
}

/// A freely reduced product of conjugates `x r^{±1} x⁻¹` of the given
/// relators, of length at most `len`.
pub fn gen_trivial_from<G: Generator>(
    relators: &[Word<G>],
    alphabet: &[G],
    seed: u64,
    len: usize,
) -> Word<G> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Word::new();
    let mut misses = 0;
    while misses < 16 {
        let r = relators.choose(&mut rng).unwrap();
        let r = if rng.gen_bool(0.5) {
            r.clone()
        } else {
            r.inverse()
        };
        let room = len.saturating_sub(w.len() as usize);
        if (r.len() as usize) > room {
            misses += 1;
            continue;
        }
        let xlen = rng.gen_range(0..=((room - r.len() as usize) / 2).min(6));
        let x = random_word(&mut rng, alphabet, xlen);
        let next = w.clone().concat(&x).concat(&r).concat(&x.inverse());
        if next.len() as usize <= len {
            w = next;
        } else {
            misses += 1;
        }
    }
    w
}

pub fn gen_trivial_baumslag(seed: u64, len: usize) -> BaumslagWord {
    gen_trivial_from(
        &baumslag_relators(),
        &[BGen::A, BGen::T, BGen::B],
        seed,
        len,
    )
}

pub fn gen_trivial_higman(seed: u64, len: usize) -> HigmanWord {
    gen_trivial_from(
        &higman_relators(),
        &[HGen(1), HGen(2), HGen(3), HGen(4)],
        seed,
        len,
    )
}

/// Text form of a trivial word of the given group.
pub fn gen_trivial_word(group: Group, seed: u64, len: usize) -> String {
    match group {
        Group::Baumslag => gen_trivial_baumslag(seed, len).to_string(),
        Group::Higman => gen_trivial_higman(seed, len).to_string(),
    }
}

/// Random DAG: nodes are created in order and each gets an arc of random
/// sign to every earlier node with probability `density`. Also registers
/// `max(1, nodes / 3)` random markings.
pub fn gen_random_circuit(seed: u64, nodes: usize, density: f64) -> PowerCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = PowerCircuit::new();
    let mut ids = Vec::with_capacity(nodes);
    for _ in 0..nodes {
        let mut succ = Marking::new();
        for &q in &ids {
            if rng.gen_bool(density) {
                succ.set(q, Some(random_sign(&mut rng)));
            }
        }
        ids.push(c.add_node(&succ).unwrap());
    }
    if nodes > 0 {
        for _ in 0..(nodes / 3).max(1) {
            let mut m = Marking::new();
            for &q in &ids {
                if rng.gen_bool(0.5) {
                    m.set(q, Some(random_sign(&mut rng)));
                }
            }
            c.register_marking(m).unwrap();
        }
    }
    c
}

/// Like [`gen_random_circuit`] but always a power circuit: a node whose
/// successor marking would be negative gets all its arc signs flipped. Signs
/// are decided on a tree representation built alongside, so no value is
/// ever written out.
pub fn gen_random_power_circuit(seed: u64, nodes: usize, density: f64) -> PowerCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = PowerCircuit::new();
    let mut mirror = TreeRep::default();
    let mut ids = Vec::with_capacity(nodes);
    let mut images = Vec::with_capacity(nodes);
    for _ in 0..nodes {
        let mut succ = Marking::new();
        let mut coeffs = Vec::new();
        for (&q, &img) in ids.iter().zip(&images) {
            if rng.gen_bool(density) {
                let s = random_sign(&mut rng);
                succ.set(q, Some(s));
                coeffs.push((img, s.to_i64()));
            }
        }
        let mut lambda = mirror
            .compactify_growing(coeffs)
            .expect("images lie in the mirror");
        if mirror.sign_of(&lambda).expect("compact") < 0 {
            succ = succ.negate();
            lambda = lambda.negate();
        }
        ids.push(c.add_node(&succ).unwrap());
        images.push(mirror.insert_node(&lambda).expect("compact"));
    }
    if nodes > 0 {
        for _ in 0..(nodes / 3).max(1) {
            let mut m = Marking::new();
            for &q in &ids {
                if rng.gen_bool(0.5) {
                    m.set(q, Some(random_sign(&mut rng)));
                }
            }
            c.register_marking(m).unwrap();
        }
    }
    c
}

fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::reference::{
        wp_baumslag_reference, wp_higman_reference, RefVerdict, DEFAULT_EXP_CAP,
    };

    #[test]
    fn trivial_words() {
        assert!(gen_trivial_baumslag(1, 0).is_empty());
        for seed in 0..20 {
            let w = gen_trivial_baumslag(seed, 40);
            assert!(w.len() <= 40);
            assert_ne!(
                wp_baumslag_reference(&w, DEFAULT_EXP_CAP),
                RefVerdict::Nontrivial,
                "{w}"
            );
            let w = gen_trivial_higman(seed, 40);
            assert!(w.len() <= 40);
            assert_ne!(
                wp_higman_reference(&w, DEFAULT_EXP_CAP),
                RefVerdict::Nontrivial,
                "{w}"
            );
        }
        assert_eq!(
            gen_trivial_word(Group::Higman, 7, 60),
            gen_trivial_word(Group::Higman, 7, 60)
        );
    }

    #[test]
    fn random_circuits() {
        let c = gen_random_circuit(3, 1, 0.5);
        assert_eq!((c.node_count(), c.arc_count()), (1, 0));
        let c = gen_random_circuit(3, 6, 0.0);
        assert_eq!(c.arc_count(), 0);
        let a = gen_random_circuit(9, 10, 0.4);
        let b = gen_random_circuit(9, 10, 0.4);
        assert!(a.is_acyclic());
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn random_power_circuits() {
        use crate::oracle::{is_power_circuit_exact, DEFAULT_BIT_BUDGET};
        for seed in 0..50 {
            let c = gen_random_power_circuit(seed, 8, 0.4);
            assert_ne!(is_power_circuit_exact(&c, DEFAULT_BIT_BUDGET), Some(false));
            assert!(TreeRep::make_tree(c).is_ok());
        }
        let c = gen_random_power_circuit(1, 300, 0.02);
        assert!(TreeRep::make_tree(c).is_ok());
    }
}
