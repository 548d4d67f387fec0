//! Build two states with a small circuit, then compare the exact overlap
//! with swap-test estimates at increasing shot counts.

use cqnn::simulator::swap_test::fidelity_from_p0;
use cqnn::simulator::{fidelity, swap_test_estimate, swap_test_p0, GateOp, Statevector};

fn main() -> cqnn::Result<()> {
    let mut a = Statevector::zero(2)?;
    a.apply(&GateOp::h(0), None)?;
    a.apply(&GateOp::cnot(0, 1), None)?;

    let mut b = Statevector::zero(2)?;
    b.apply(&GateOp::ry(0, 0), Some(1.1))?;
    b.apply(&GateOp::ry(1, 0), Some(0.4))?;

    let f = fidelity(&a, &b)?;
    println!("exact fidelity   {f:.6}");
    println!("P(ancilla = 0)   {:.6}", swap_test_p0(&a, &b)?);
    for shots in [100, 10_000, 1_000_000] {
        let est = fidelity_from_p0(swap_test_estimate(&a, &b, shots, 42)?);
        println!("{shots:>9} shots  {est:.6}  (error {:+.1e})", est - f);
    }
    Ok(())
}
