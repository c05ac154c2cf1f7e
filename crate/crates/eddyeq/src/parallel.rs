//! Sweeps spread over worker threads.
//!
//! Each frequency is computed by the same pure function whatever thread runs
//! it, and results are stitched back in grid order, so the output does not
//! depend on the thread count.

use eddyeq_core::analysis::{assemble, Evaluation, PreparedModel, SweepOutcome};
use eddyeq_core::model::{frequency_grid, Plate, SweepSpec};

pub fn available_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn evaluate_all(
    model: &PreparedModel,
    plate: &Plate,
    frequencies: &[f64],
    threads: usize,
) -> Vec<eddyeq_core::Result<Evaluation>> {
    let threads = threads.clamp(1, frequencies.len().max(1));
    if threads == 1 {
        return frequencies.iter().map(|&f| model.evaluate(plate, f)).collect();
    }
    let chunk = frequencies.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = frequencies
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&f| model.evaluate(plate, f)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    })
}

pub fn sweep(model: &PreparedModel, plate: &Plate, spec: &SweepSpec, threads: usize) -> eddyeq_core::Result<SweepOutcome> {
    let frequencies = frequency_grid(spec)?;
    let results = evaluate_all(model, plate, &frequencies, threads);
    assemble(model, frequencies, results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use eddyeq_core::analysis::{self, ForwardModel};
    use eddyeq_core::dodd_deeds::QuadratureSpec;
    use eddyeq_core::model::{default_sensor, Spacing};

    #[test]
    fn thread_count_does_not_change_results() {
        let coil = default_sensor();
        let quad = QuadratureSpec { n_panels: 32, ..QuadratureSpec::default_for(&coil) };
        let model = PreparedModel::new(&ForwardModel::DoddDeeds { coil, quad }).unwrap();
        let plate = Plate::non_magnetic(59.8e6, 0.56e-3).unwrap();
        let spec = SweepSpec::new(1e3, 5e5, 13, Spacing::Logarithmic);
        let serial = analysis::sweep_detailed(&model, &plate, &spec).unwrap();
        for t in [1, 2, 3, 8, 64] {
            assert_eq!(sweep(&model, &plate, &spec, t).unwrap(), serial);
        }
    }
}
