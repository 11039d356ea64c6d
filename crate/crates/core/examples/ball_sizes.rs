use coarse_core::gallery::{heisenberg_ball_sizes, lattice_ball_sizes, comb, heisenberg};

fn main() {
    println!("heisenberg |B(R)| R=1..8: {:?}", heisenberg_ball_sizes(8));
    println!("z3 |B(R)| R=1..8:        {:?}", lattice_ball_sizes(3, 8));
    for m in [1, 4, 5, 6, 8, 10] {
        let c = comb(m).unwrap();
        println!("comb({m}): vertices = {}, ray_end = {}", c.x.len(), c.ray_end);
    }
    for r in [4, 5, 6] {
        let h = heisenberg(r).unwrap();
        println!("heisenberg({r}): e_ball = {} points, g_ball = {}", h.e_ball.len(), h.g_ball.len());
    }
}
