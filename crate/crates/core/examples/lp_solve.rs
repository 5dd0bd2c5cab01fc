//! The dense simplex engine on a small production-planning LP.

use quantcut::lp::{solve_lp, LinearProgram, LpStatus, Relation};

fn main() {
    // maximize 3a + 5b  s.t.  a <= 4, 2b <= 12, 3a + 2b <= 18
    let mut lp = LinearProgram::new(2);
    lp.objective = vec![-3.0, -5.0];
    lp.add_constraint(vec![1.0, 0.0], Relation::Le, 4.0);
    lp.add_constraint(vec![0.0, 2.0], Relation::Le, 12.0);
    lp.add_constraint(vec![3.0, 2.0], Relation::Le, 18.0);

    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    println!("a = {}, b = {}, profit {} after {} pivots", sol.values[0], sol.values[1], -sol.objective, sol.iterations);

    lp.add_constraint(vec![1.0, 1.0], Relation::Ge, 20.0);
    println!("with a + b >= 20: {:?}", solve_lp(&lp).unwrap().status);
}
