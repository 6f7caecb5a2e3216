//! Pareto filtering, hypervolume, and front comparison on handmade points.

use castplan::metrics::{compare_fronts, hypervolume, pareto_filter, KpiPoint, MethodFront};

fn p(filling_ratio: f64, lead_time: f64) -> KpiPoint {
    KpiPoint {
        filling_ratio,
        lead_time,
    }
}

fn main() {
    // Filling is maximized, lead time minimized. (0.6, 7) is dominated by
    // (0.7, 6); the duplicate (0.5, 2) collapses.
    let points = vec![p(0.7, 6.0), p(0.5, 2.0), p(0.6, 7.0), p(0.5, 2.0)];
    let front = pareto_filter(&points);
    println!("front of {} points: {:?}", points.len(), front);

    // Hypervolume is the area under the front's staircase after lead time is
    // flipped into a utility on [0, 1].
    let lead_max = 10.0;
    println!(
        "hypervolume on L_max {}: {:.4}",
        lead_max,
        hypervolume(&front, lead_max)
    );

    // A dominated point never changes the value.
    let mut padded = front.clone();
    padded.push(p(0.4, 9.0));
    assert_eq!(hypervolume(&padded, lead_max), hypervolume(&front, lead_max));

    // Cross-method comparison on a shared lead scale. The baseline is the
    // non-separation front; the improvement rate is the relative hypervolume
    // gain over it.
    let fronts = [
        MethodFront {
            method: "separation-sa".into(),
            points: vec![p(0.7, 6.0), p(0.5, 8.0)],
        },
        MethodFront {
            method: "non-separation".into(),
            points: vec![p(0.5, 8.0), p(0.3, 10.0)],
        },
    ];
    let cmp = compare_fronts(&fronts).expect("two fronts supplied");
    println!(
        "shared L_max {}; baseline {}",
        cmp.lead_max, cmp.baseline_method
    );
    for row in &cmp.methods {
        match row.improvement_pct {
            Some(pct) => println!(
                "  {}: hv {:.4} ({:+.0}% vs baseline)",
                row.method, row.hypervolume, pct
            ),
            None => println!("  {}: hv {:.4} (baseline)", row.method, row.hypervolume),
        }
    }
}
