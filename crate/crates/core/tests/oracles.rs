//! Dense reference computations checked against the structured code paths.

use num_complex::Complex64;
use qlink::compiler::{compile_step, Circuit, GateSet};
use qlink::dynamics::{exact_evolve, trotter_evolve, Propagator, TrotterPlan};
use qlink::linalg::{commutator, expi_hermitian, CVector};
use qlink::linkmodel::{gauge_generator, gauge_sectors, plaquette_hamiltonian, plaquette_monomials};
use qlink::matter::{build_h0, build_v, ChainConfig};
use qlink::{PauliString, PlaquetteLayout, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    StateVector::new((0..1 << n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .unwrap()
}

fn strings(t: &PlaquetteLayout) -> Vec<PauliString> {
    plaquette_monomials(t, 1.0).unwrap().into_iter().map(|m| m.term).collect()
}

#[test]
fn hamiltonian_is_gauge_invariant_hermitian_and_traceless() {
    let t = PlaquetteLayout::triangle();
    let h = plaquette_hamiltonian(&t, 0.8).unwrap().dense(6).unwrap();
    assert!((h.adjoint() - &h).camax() < 1e-12);
    assert!(h.trace().norm() < 1e-12);
    for v in t.vertices() {
        for a in 1..=3 {
            let g = gauge_generator(&t, v.id, a).unwrap().dense(6).unwrap();
            assert!(commutator(&h, &g).camax() < 1e-10);
        }
    }
}

#[test]
fn casimir_degeneracies_match_vertex_counting() {
    // each link holds one spin-1/2 at its tail or its head
    let t = PlaquetteLayout::triangle();
    let mut counts = std::collections::BTreeMap::new();
    let table = gauge_sectors(&t).unwrap();
    for e in &table.entries {
        counts.insert((e.eigenvalue * 4.0).round() as i64, e.degeneracy);
    }
    let mut brute = std::collections::BTreeMap::new();
    for ends in 0..8u32 {
        // bit l set: link l occupies its R end (head), else its L end (tail)
        let mut per_vertex = [0usize; 3];
        for l in 0..3 {
            let tail = l;
            let head = (l + 1) % 3;
            per_vertex[if ends >> l & 1 == 1 { head } else { tail }] += 1;
        }
        // occupied ends per vertex: none -> j=0, one -> j=1/2, two -> j=0 + j=1
        let mut multiplets: Vec<(f64, usize)> = vec![(0.0, 1)];
        for &k in &per_vertex {
            let options: Vec<(f64, usize)> = match k {
                0 => vec![(0.0, 1)],
                1 => vec![(0.75, 2)],
                _ => vec![(0.0, 1), (2.0, 3)],
            };
            multiplets = multiplets
                .iter()
                .flat_map(|&(c0, d0)| options.iter().map(move |&(c1, d1)| (c0 + c1, d0 * d1)))
                .collect();
        }
        for (cas, deg) in multiplets {
            *brute.entry((cas * 4.0).round() as i64).or_insert(0) += deg;
        }
    }
    assert_eq!(counts, brute);
}

#[test]
fn trotter_matches_dense_product_formula() {
    let t = PlaquetteLayout::triangle();
    let h = plaquette_hamiltonian(&t, 1.0).unwrap();
    let plan = TrotterPlan::listing(&t, 1.0, 3, 0.6).unwrap();
    let psi = random_state(6, 7);
    let tau = plan.time() / plan.steps() as f64;
    let mut v = CVector::from_column_slice(psi.amplitudes());
    for _ in 0..plan.steps() {
        for p in plan.order() {
            let d = qlink::PauliSum::from(p.clone()).dense(6).unwrap();
            v = expi_hermitian(&d, -tau).unwrap() * v;
        }
    }
    let got = trotter_evolve(&h, &plan, &psi).unwrap();
    let want = StateVector::new(v.as_slice().to_vec()).unwrap();
    assert!(got.distance(&want).unwrap() < 1e-12);
}

#[test]
fn exact_evolution_matches_dense_exponential() {
    let t = PlaquetteLayout::triangle();
    let h = plaquette_hamiltonian(&t, 1.0).unwrap();
    let psi = random_state(6, 11);
    let u = expi_hermitian(&h.dense(6).unwrap(), -1.3).unwrap();
    let want = StateVector::new((u * CVector::from_column_slice(psi.amplitudes())).as_slice().to_vec()).unwrap();
    assert!(exact_evolve(&h, &psi, 1.3).unwrap().distance(&want).unwrap() < 1e-12);
    let p = Propagator::new(&h, 6).unwrap();
    let back = p.evolve(&p.evolve(&psi, 0.9).unwrap(), -0.9).unwrap();
    assert!(back.distance(&psi).unwrap() < 1e-12);
}

#[test]
fn compiled_step_reproduces_trotter_step() {
    let t = PlaquetteLayout::triangle();
    let h = plaquette_hamiltonian(&t, 1.0).unwrap();
    let s = strings(&t);
    let phi = 0.35;
    let psi = random_state(6, 3);
    let want = trotter_evolve(&h, &TrotterPlan::listing(&t, 1.0, 1, phi).unwrap(), &psi).unwrap();
    let circuit: Circuit = compile_step(&s, phi, GateSet::Collective, None).unwrap();
    let mut amps = psi.amplitudes().to_vec();
    circuit.apply(&mut amps);
    let got = StateVector::new(amps).unwrap();
    let phase = got.inner(&want).unwrap();
    assert!((phase.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn cphase_step_verifies_against_product_of_exponentials() {
    let t = PlaquetteLayout::triangle();
    let s = strings(&t);
    let c = compile_step(&s, 0.2, GateSet::Cphase, None).unwrap();
    assert!(qlink::compiler::verify(&c, &s, 0.2).unwrap() < 1e-9);
    assert_eq!(c.recount(), c.counts());
}

#[test]
fn matter_penalty_term_is_nonnegative_and_hopping_couples_sectors() {
    let cfg = ChainConfig { omega: 0.0, ..ChainConfig::minimal(0.2, 2.0) };
    let h0 = build_h0(&cfg).unwrap();
    assert!(h0.diagonal().iter().all(|x| x.re >= 0.0 && x.im == 0.0));
    let v = build_v(&cfg).unwrap();
    assert!((v.adjoint() - &v).camax() < 1e-14);
    let zero = build_v(&ChainConfig { j0: 0.0, ..cfg }).unwrap();
    assert_eq!(zero.camax(), 0.0);
}
