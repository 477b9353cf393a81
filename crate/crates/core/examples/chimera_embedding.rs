//! Embeds the ice lattice into a defective Chimera graph and checks the family.
use spinice::embedding::{build_chimera, embed_family, reference_defects, validate_embedding};
use spinice::ice::CouplingSpec;
use spinice::sampler::chain_rng;

fn main() -> spinice::Result<()> {
    let g = build_chimera(16, 16, &reference_defects())?;
    let (lattice, mut family) = embed_family(&g, 5, &mut chain_rng(11, 0))?;
    println!("{}x{} logical lattice, {} vacancies", lattice.rows(), lattice.cols(), lattice.vacancies().len());
    for (k, e) in family.iter_mut().enumerate() {
        e.program(&CouplingSpec::degenerate(0.5));
        let r = validate_embedding(e)?;
        println!("embedding {k}: valid {} chains {} couplers {}", r.is_valid(), r.chains, r.couplers);
    }
    Ok(())
}
