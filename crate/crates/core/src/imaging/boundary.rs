//! Moore-neighbor boundary tracing with Jacob's stopping criterion.
//!
//! The walk runs on a virtually zero-padded copy of the mask, starts at the
//! top-most then left-most object pixel and scans the 8-neighborhood
//! clockwise in screen order, which yields a counterclockwise chain in
//! (x, y) coordinates (positive shoelace area). Thin sections are visited
//! once per side, so chain points may repeat for one-pixel-wide arms.

use super::{BinaryMask, BoundaryChain};
use crate::error::{Error, Result};

/// Screen-clockwise Moore neighborhood starting at W.
const DIRS: [(isize, isize); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];

/// Traces the outer boundary of the single 8-connected region in `mask`.
/// `origin` shifts the emitted points into source-image coordinates.
pub fn trace_boundary(mask: &BinaryMask, origin: (usize, usize)) -> Result<BoundaryChain> {
    let start = find_start(mask).ok_or_else(|| {
        Error::EmptyRegion("cannot trace the boundary of an empty mask".into())
    })?;

    let (ox, oy) = (origin.0 as i64, origin.1 as i64);
    let mut points: Vec<(i64, i64)> = vec![(start.0 + ox, start.1 + oy)];

    let mut cur = start;
    // Backtrack direction index: the neighbor we conceptually arrived from.
    // The start pixel has no object pixel to its west (left-most in the
    // top-most row), so W is a valid initial backtrack.
    let mut backtrack = 0usize;
    let mut first_move: Option<((i64, i64), usize)> = None;
    // Each boundary pixel can be entered from at most 8 states.
    let guard_limit = 8 * mask.width() * mask.height() + 16;
    let mut steps = 0usize;

    loop {
        let mut advanced = false;
        for i in 1..=8 {
            let d = (backtrack + i) % 8;
            let nx = cur.0 + DIRS[d].0 as i64;
            let ny = cur.1 + DIRS[d].1 as i64;
            if mask.get_padded(nx as isize, ny as isize) {
                // New backtrack: the previously examined (empty) neighbor,
                // expressed as a direction from the pixel we move onto.
                let prev = (backtrack + i - 1) % 8;
                let bx = cur.0 + DIRS[prev].0 as i64;
                let by = cur.1 + DIRS[prev].1 as i64;
                let ddx = (bx - nx) as isize;
                let ddy = (by - ny) as isize;
                backtrack = DIRS
                    .iter()
                    .position(|&d| d == (ddx, ddy))
                    .expect("backtrack is always an 8-neighbor");
                cur = (nx, ny);
                advanced = true;
                break;
            }
        }
        if !advanced {
            // Isolated pixel: degenerate closed chain of length 1.
            return Ok(BoundaryChain { points });
        }
        let state = (cur, backtrack);
        match first_move {
            None => first_move = Some(state),
            Some(first) if state == first => break,
            _ => {}
        }
        points.push((cur.0 + ox, cur.1 + oy));
        steps += 1;
        if steps > guard_limit {
            return Err(Error::Numerical(
                "boundary trace failed to close; mask may not be 8-connected".into(),
            ));
        }
    }
    // The stopping state re-enters the start pixel; drop that duplicate.
    if points.len() > 1 && points.last() == Some(&points[0]) {
        points.pop();
    }
    Ok(BoundaryChain { points })
}

fn find_start(mask: &BinaryMask) -> Option<(i64, i64)> {
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                return Some((x as i64, y as i64));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, VecDeque};

    fn mask_from(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        let bits = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| c == '#'))
            .collect();
        BinaryMask::new(w, h, bits).unwrap()
    }

    /// Object pixels 4-adjacent to the background component reachable from
    /// the padding ring (inner hole rims excluded).
    fn exterior_boundary_pixels(mask: &BinaryMask) -> BTreeSet<(i64, i64)> {
        let (w, h) = (mask.width() as isize, mask.height() as isize);
        let mut ext = vec![false; ((w + 2) * (h + 2)) as usize];
        let idx = |x: isize, y: isize| ((y + 1) * (w + 2) + (x + 1)) as usize;
        let mut queue = VecDeque::new();
        ext[idx(-1, -1)] = true;
        queue.push_back((-1isize, -1isize));
        while let Some((x, y)) = queue.pop_front() {
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (nx, ny) = (x + dx, y + dy);
                if nx < -1 || ny < -1 || nx > w || ny > h {
                    continue;
                }
                if !mask.get_padded(nx, ny) && !ext[idx(nx, ny)] {
                    ext[idx(nx, ny)] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        let mut out = BTreeSet::new();
        for y in 0..h {
            for x in 0..w {
                if mask.get_padded(x, y) {
                    for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                        if ext[idx(x + dx, y + dy)] {
                            out.insert((x as i64, y as i64));
                            break;
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn single_pixel_degenerate_chain() {
        let mask = mask_from(&["...", ".#.", "..."]);
        let chain = trace_boundary(&mask, (0, 0)).unwrap();
        assert_eq!(chain.points, vec![(1, 1)]);
    }

    #[test]
    fn two_by_two_square_visits_all_pixels() {
        let mask = mask_from(&["....", ".##.", ".##.", "...."]);
        let chain = trace_boundary(&mask, (0, 0)).unwrap();
        assert_eq!(chain.points, vec![(1, 1), (2, 1), (2, 2), (1, 2)]);
        assert!(chain.signed_area_doubled() > 0, "chain is counterclockwise");
    }

    #[test]
    fn origin_offsets_points() {
        let mask = mask_from(&["#"]);
        let chain = trace_boundary(&mask, (5, 9)).unwrap();
        assert_eq!(chain.points, vec![(5, 9)]);
    }

    #[test]
    fn disk_chain_matches_perimeter_oracle() {
        let mut mask = BinaryMask::empty(11, 11);
        for y in 0..11i64 {
            for x in 0..11i64 {
                if (x - 5) * (x - 5) + (y - 5) * (y - 5) <= 25 {
                    mask.set(x as usize, y as usize, true);
                }
            }
        }
        let chain = trace_boundary(&mask, (0, 0)).unwrap();
        let oracle = exterior_boundary_pixels(&mask);
        let visited: BTreeSet<(i64, i64)> = chain.points.iter().copied().collect();
        assert_eq!(visited, oracle);
        // a convex disk has no thin sections, so no revisits
        assert_eq!(chain.points.len(), oracle.len());
        assert_eq!(chain.points.len(), 28);
    }

    #[test]
    fn diagonal_line_revisits_each_side() {
        let mask = mask_from(&["#....", ".#...", "..#..", "...#.", "....#"]);
        let chain = trace_boundary(&mask, (0, 0)).unwrap();
        // out and back: 2n - 2 visited positions
        assert_eq!(chain.points.len(), 8);
        let unique: BTreeSet<_> = chain.points.iter().collect();
        assert_eq!(unique.len(), 5);
        // closure: consecutive points (and the wrap pair) are 8-neighbors
        let n = chain.points.len();
        for k in 0..n {
            let (x0, y0) = chain.points[k];
            let (x1, y1) = chain.points[(k + 1) % n];
            assert!((x1 - x0).abs() <= 1 && (y1 - y0).abs() <= 1);
        }
    }

    #[test]
    fn starts_topmost_leftmost() {
        let mask = mask_from(&[".....", "..##.", ".###.", "....."]);
        let chain = trace_boundary(&mask, (0, 0)).unwrap();
        assert_eq!(chain.points[0], (2, 1));
    }

    #[test]
    fn chain_covers_exterior_boundary_of_random_blobs() {
        use crate::rng::SplitMix64;
        let mut rng = SplitMix64::new(77);
        for _ in 0..20 {
            // union of a few disks around the center stays 8-connected
            let mut mask = BinaryMask::empty(32, 32);
            let disks = 2 + rng.below(3);
            for _ in 0..disks {
                let cx = 12.0 + rng.range_f64(0.0, 8.0);
                let cy = 12.0 + rng.range_f64(0.0, 8.0);
                let r = 3.0 + rng.range_f64(0.0, 5.0);
                for y in 0..32 {
                    for x in 0..32 {
                        let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
                        if d2 <= r * r {
                            mask.set(x, y, true);
                        }
                    }
                }
            }
            let chain = trace_boundary(&mask, (0, 0)).unwrap();
            let visited: BTreeSet<(i64, i64)> = chain.points.iter().copied().collect();
            let oracle = exterior_boundary_pixels(&mask);
            assert!(visited.is_superset(&oracle), "missed exterior boundary pixels");
            // every chain point is a boundary pixel (has an empty 4-neighbor)
            for &(x, y) in &chain.points {
                let open = [(1, 0), (-1, 0), (0, 1), (0, -1)]
                    .iter()
                    .any(|&(dx, dy)| !mask.get_padded(x as isize + dx, y as isize + dy));
                assert!(open, "({x},{y}) is interior");
            }
        }
    }

    #[test]
    fn empty_mask_errors() {
        let mask = BinaryMask::empty(4, 4);
        assert!(matches!(
            trace_boundary(&mask, (0, 0)),
            Err(Error::EmptyRegion(_))
        ));
    }
}
