use kthmax::evt::{build_law, LawKind, LinkGroup};
use kthmax::metrics::{avg_throughput_quadrature, MetricParams};
use kthmax::{LinkEnsemble, OrderSelector};

fn main() -> Result<(), kthmax::Error> {
    let links = LinkEnsemble::new(vec![LinkGroup::new(1.0, 10), LinkGroup::new(0.5, 10)], 2.0)?;
    let law = build_law(&links, OrderSelector::new(2)?, LawKind::FiniteM)?;
    let params = MetricParams::new(1.0, 1.0, 1.0, 0.25, 0.25)?;
    println!("P(Z(2) <= 20) = {}", law.cdf(20.0)?);
    println!("rate = {} bit/s/Hz", avg_throughput_quadrature(law.as_ref(), &params)?);
    Ok(())
}
