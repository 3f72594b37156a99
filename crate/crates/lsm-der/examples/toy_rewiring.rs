//! Network rewiring on a toy problem small enough to verify against
//! exhaustive search, plus wiring checkpoint/restore through the text
//! format.
//!
//! Run with: cargo run --release -p lsm-der --example toy_rewiring

use lsm_der::dataset::SampleSet;
use lsm_der::dendrite::{DendriticCell, NonlinearityParams, ReadoutPair, Squash};
use lsm_der::rewiring::{evaluate_mae, train, FitnessKind, TrainerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lsm_der::Result<()> {
    // One branch of two binary synapses per cell over four lines.
    let nl = NonlinearityParams::unbounded(1.0)?;
    let mut data = SampleSet::new(4);
    data.push(&[1.0, 0.2, 0.0, 0.4], 0.9)?;
    data.push(&[0.0, 1.0, 0.3, 0.1], 0.2)?;
    data.push(&[0.5, 0.5, 1.0, 0.0], 0.6)?;

    // Exhaustive search over all multisets of 2 lines for each cell.
    let mut wirings = Vec::new();
    for a in 0..4 {
        for b in a..4 {
            wirings.push(vec![a, b]);
        }
    }
    let mut best = f64::INFINITY;
    let mut best_pair = None;
    for wp in &wirings {
        for wn in &wirings {
            let pos = DendriticCell::new(1, 2, 4, wp.clone())?;
            let neg = DendriticCell::new(1, 2, 4, wn.clone())?;
            let pair = ReadoutPair::new(pos, neg, nl, Squash::SigmoidHalf)?;
            let mae = evaluate_mae(&pair, &data)?;
            if mae < best {
                best = mae;
                best_pair = Some((wp.clone(), wn.clone()));
            }
        }
    }
    let (bp, bn) = best_pair.unwrap();
    println!("exhaustive optimum: mae {best:.6} with wiring +{bp:?} -{bn:?}");

    // The rewiring trainer should land on the same error.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pair = ReadoutPair::random(1, 2, 4, nl, Squash::SigmoidHalf, &mut rng)?;
    let cfg = TrainerConfig {
        target_set: 2,
        replacement_set: 2,
        max_iterations: 500,
        max_local: 3,
        seed: 9,
        fitness: FitnessKind::LinearError,
    };
    let trace = train(&mut pair, &data, &cfg)?;
    println!(
        "rewiring: initial mae {:.6}, best {:.6} at iteration {} ({} accepted swaps, {} escapes)",
        trace.initial_mae,
        trace.best_mae,
        trace.best_iteration,
        trace.accepted_count(),
        trace.escape_count()
    );
    println!(
        "trained wiring: +{:?} -{:?}",
        pair.positive.wiring(),
        pair.negative.wiring()
    );

    // Checkpoint the trained wiring and restore it.
    let mut buf = Vec::new();
    pair.write_wiring(&mut buf)?;
    println!("--- wiring file (one line per branch, positive cell first) ---");
    print!("{}", String::from_utf8_lossy(&buf));
    let restored = ReadoutPair::read_wiring(
        std::io::Cursor::new(&buf),
        1,
        4,
        nl,
        Squash::SigmoidHalf,
    )?;
    println!(
        "restored readout reproduces mae {:.6}",
        evaluate_mae(&restored, &data)?
    );
    Ok(())
}
