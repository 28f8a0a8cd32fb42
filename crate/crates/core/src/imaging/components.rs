//! Connected-component extraction: 8-connectivity for objects (thin diagonal
//! stems stay whole), deterministic ordering so downstream processing is
//! reproducible.

use super::{trace_boundary, BinaryMask, CandidateObject};
use crate::error::Result;

/// Labels 8-connected regions of `mask`, drops those below `min_area` and
/// returns the rest ordered by descending area, ties by row-major origin.
pub fn connected_components(mask: &BinaryMask, min_area: usize) -> Result<Vec<CandidateObject>> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for start_y in 0..h {
        for start_x in 0..w {
            if !mask.get(start_x, start_y) || seen[start_y * w + start_x] {
                continue;
            }
            let mut pixels: Vec<(usize, usize)> = Vec::new();
            seen[start_y * w + start_x] = true;
            stack.push((start_x, start_y));
            while let Some((x, y)) = stack.pop() {
                pixels.push((x, y));
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = x as isize + dx;
                        let ny = y as isize + dy;
                        if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if mask.get(nx, ny) && !seen[ny * w + nx] {
                            seen[ny * w + nx] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            if pixels.len() < min_area {
                continue;
            }

            let min_x = pixels.iter().map(|p| p.0).min().unwrap();
            let max_x = pixels.iter().map(|p| p.0).max().unwrap();
            let min_y = pixels.iter().map(|p| p.1).min().unwrap();
            let max_y = pixels.iter().map(|p| p.1).max().unwrap();
            let (cw, ch) = (max_x - min_x + 1, max_y - min_y + 1);
            let mut cropped = BinaryMask::empty(cw, ch);
            for &(x, y) in &pixels {
                cropped.set(x - min_x, y - min_y, true);
            }
            let boundary = trace_boundary(&cropped, (min_x, min_y))?;
            out.push(CandidateObject {
                area: pixels.len(),
                mask: cropped,
                origin: (min_x, min_y),
                boundary,
            });
        }
    }

    out.sort_by(|a, b| {
        b.area
            .cmp(&a.area)
            .then(a.origin.1.cmp(&b.origin.1))
            .then(a.origin.0.cmp(&b.origin.0))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn mask_from(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        let bits = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| c == '#'))
            .collect();
        BinaryMask::new(w, h, bits).unwrap()
    }

    #[test]
    fn two_disjoint_squares() {
        let mask = mask_from(&[
            "###....",
            "###....",
            "###.###",
            "....###",
            "....###",
        ]);
        let cs = connected_components(&mask, 1).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.area == 9));
        // tie on area: row-major origin order
        assert_eq!(cs[0].origin, (0, 0));
        assert_eq!(cs[1].origin, (4, 2));
    }

    #[test]
    fn diagonal_chain_is_one_component() {
        let mask = mask_from(&["#...", ".#..", "..#.", "...#"]);
        let cs = connected_components(&mask, 1).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].area, 4);
    }

    #[test]
    fn min_area_filters() {
        let mask = mask_from(&["##..#", "##...", "....."]);
        let cs = connected_components(&mask, 2).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].area, 4);
    }

    #[test]
    fn ordering_is_area_descending() {
        let mask = mask_from(&["#.###", ".....", "##..."]);
        let cs = connected_components(&mask, 1).unwrap();
        let areas: Vec<usize> = cs.iter().map(|c| c.area).collect();
        assert_eq!(areas, vec![3, 2, 1]);
    }

    /// Recursive flood fill, independent of the stack-based labelling.
    fn flood_count(mask: &BinaryMask) -> (usize, usize) {
        fn fill(mask: &BinaryMask, seen: &mut [bool], x: isize, y: isize) -> usize {
            if !mask.get_padded(x, y) || seen[y as usize * mask.width() + x as usize] {
                return 0;
            }
            seen[y as usize * mask.width() + x as usize] = true;
            let mut n = 1;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    if dx != 0 || dy != 0 {
                        n += fill(mask, seen, x + dx, y + dy);
                    }
                }
            }
            n
        }
        let mut seen = vec![false; mask.width() * mask.height()];
        let mut comps = 0;
        let mut total = 0;
        for y in 0..mask.height() {
            for x in 0..mask.width() {
                if mask.get(x, y) && !seen[y * mask.width() + x] {
                    comps += 1;
                    total += fill(mask, &mut seen, x as isize, y as isize);
                }
            }
        }
        (comps, total)
    }

    #[test]
    fn component_count_matches_flood_fill_oracle() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..10 {
            let bits: Vec<bool> = (0..32 * 32).map(|_| rng.next_f64() < 0.35).collect();
            let mask = BinaryMask::new(32, 32, bits).unwrap();
            let cs = connected_components(&mask, 1).unwrap();
            let (comps, total) = flood_count(&mask);
            assert_eq!(cs.len(), comps);
            assert_eq!(cs.iter().map(|c| c.area).sum::<usize>(), total);
        }
    }

    #[test]
    fn partition_property() {
        // with min_area 1 every object pixel lands in exactly one component
        let mut rng = SplitMix64::new(6);
        let bits: Vec<bool> = (0..24 * 24).map(|_| rng.next_f64() < 0.4).collect();
        let mask = BinaryMask::new(24, 24, bits).unwrap();
        let cs = connected_components(&mask, 1).unwrap();
        let mut covered = vec![0u8; 24 * 24];
        for c in &cs {
            for y in 0..c.mask.height() {
                for x in 0..c.mask.width() {
                    if c.mask.get(x, y) {
                        covered[(y + c.origin.1) * 24 + (x + c.origin.0)] += 1;
                    }
                }
            }
        }
        for (i, &n) in covered.iter().enumerate() {
            assert_eq!(n, u8::from(mask.bits()[i]), "pixel {i}");
        }
        assert_eq!(
            cs.iter().map(|c| c.area).sum::<usize>(),
            mask.count_true()
        );
    }

    #[test]
    fn candidate_invariants_hold() {
        let mask = mask_from(&[".##.", "####", ".#.."]);
        let cs = connected_components(&mask, 1).unwrap();
        let c = &cs[0];
        assert_eq!(c.area, c.mask.count_true());
        for &(x, y) in &c.boundary.points {
            assert!(x >= c.origin.0 as i64 && y >= c.origin.1 as i64);
            assert!(x < (c.origin.0 + c.mask.width()) as i64);
            assert!(y < (c.origin.1 + c.mask.height()) as i64);
        }
    }

    #[test]
    fn empty_mask_yields_no_candidates() {
        let mask = BinaryMask::empty(8, 8);
        assert!(connected_components(&mask, 1).unwrap().is_empty());
    }
}
