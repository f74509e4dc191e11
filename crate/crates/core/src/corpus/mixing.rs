use rand::seq::index;
use rand::Rng;

use super::model::{Platform, Post, Timeline, UserRecord};
use crate::error::{Error, Result};

/// Share of the training budget drawn from a single extra platform.
pub const SINGLE_EXTRA_SHARE: f64 = 0.2;
/// Combined share when two extra platforms are mixed in.
pub const DOUBLE_EXTRA_SHARE: f64 = 0.4;

#[derive(Debug, Clone)]
pub struct MixedTimeline {
    pub timeline: Timeline,
    /// `(platform, posts taken)` for every source, primary first.
    pub composition: Vec<(Platform, usize)>,
    pub warnings: Vec<String>,
}

/// Per-extra quotas for a training budget of `total` posts. Quotas are
/// floored; the remainder goes to the primary source.
pub fn mixing_quotas(total: usize, num_extras: usize) -> Vec<usize> {
    match num_extras {
        0 => Vec::new(),
        1 => vec![((SINGLE_EXTRA_SHARE * total as f64).floor() as usize).max(1)],
        n => {
            let combined = (DOUBLE_EXTRA_SHARE * total as f64).floor() as usize;
            let each = (combined / n).max(1);
            vec![each; n]
        }
    }
}

/// Samples a `total`-post training timeline for `user`, drawing the extra
/// platforms' quotas first and filling the rest from `primary`.
pub fn mix_training_sources<R: Rng + ?Sized>(
    user: &UserRecord,
    primary: Platform,
    extras: &[Platform],
    total: usize,
    rng: &mut R,
) -> Result<MixedTimeline> {
    let pool = |p: Platform| {
        user.timeline(p)
            .map(Timeline::posts)
            .ok_or_else(|| Error::MissingPlatform {
                user: user.user_id.clone(),
                platform: p.to_string(),
            })
    };
    let primary_pool = pool(primary)?;
    let extra_pools = extras
        .iter()
        .map(|&p| pool(p).map(|posts| (p, posts)))
        .collect::<Result<Vec<_>>>()?;
    mix_from_pools(&user.user_id, (primary, primary_pool), &extra_pools, total, rng)
}

/// Pool-level mixing used when only part of a timeline is eligible (e.g. the
/// chronological training portion).
pub fn mix_from_pools<R: Rng + ?Sized>(
    user_id: &str,
    primary: (Platform, &[Post]),
    extras: &[(Platform, &[Post])],
    total: usize,
    rng: &mut R,
) -> Result<MixedTimeline> {
    if total < 5 {
        return Err(Error::InvalidConfig(format!(
            "training budget must be at least 5 posts, got {total}"
        )));
    }
    for (i, (p, _)) in extras.iter().enumerate() {
        if *p == primary.0 || extras[..i].iter().any(|(q, _)| q == p) {
            return Err(Error::InvalidConfig(format!("platform {p} listed twice")));
        }
    }

    let quotas = mixing_quotas(total, extras.len());
    let mut warnings = Vec::new();
    let mut chosen: Vec<Post> = Vec::with_capacity(total);
    let mut composition = Vec::with_capacity(extras.len() + 1);
    let mut extra_taken = 0;
    for ((platform, posts), quota) in extras.iter().zip(quotas) {
        let take = quota.min(posts.len());
        if take < quota {
            let msg = format!(
                "user {user_id}: {platform} has {} posts, quota {quota}; backfilling from {}",
                posts.len(),
                primary.0
            );
            tracing::warn!("{msg}");
            warnings.push(msg);
        }
        chosen.extend(sample(posts, take, rng));
        composition.push((*platform, take));
        extra_taken += take;
    }

    let need = total - extra_taken;
    if primary.1.len() < need {
        return Err(Error::InsufficientPosts {
            needed: need,
            available: primary.1.len(),
        });
    }
    chosen.extend(sample(primary.1, need, rng));
    composition.insert(0, (primary.0, need));

    Ok(MixedTimeline {
        timeline: Timeline::new(user_id, primary.0, chosen),
        composition,
        warnings,
    })
}

/// Uniform sample without replacement, returned in timeline order.
pub fn sample<R: Rng + ?Sized>(posts: &[Post], amount: usize, rng: &mut R) -> Vec<Post> {
    let mut idx = index::sample(rng, posts.len(), amount).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| posts[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn user(counts: &[(Platform, usize)]) -> UserRecord {
        let mut timelines = BTreeMap::new();
        for &(p, n) in counts {
            let posts = (0..n)
                .map(|i| Post {
                    id: format!("{p}-{i}"),
                    user_id: "u".into(),
                    platform: p,
                    timestamp: i as i64,
                    text: "x".into(),
                    venue_category: (p == Platform::Foursquare).then(|| "Gym".to_string()),
                })
                .collect();
            timelines.insert(p, Timeline::new("u", p, posts));
        }
        UserRecord {
            user_id: "u".into(),
            timelines,
        }
    }

    fn count(t: &Timeline, p: Platform) -> usize {
        t.posts().iter().filter(|x| x.platform == p).count()
    }

    #[test]
    fn one_extra_takes_twenty_percent() {
        let u = user(&[(Platform::Twitter, 200), (Platform::Instagram, 50)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = mix_training_sources(&u, Platform::Twitter, &[Platform::Instagram], 100, &mut rng).unwrap();
        assert_eq!(count(&m.timeline, Platform::Instagram), 20);
        assert_eq!(count(&m.timeline, Platform::Twitter), 80);
    }

    #[test]
    fn two_extras_take_forty_percent() {
        let u = user(&[
            (Platform::Twitter, 200),
            (Platform::Instagram, 50),
            (Platform::Foursquare, 50),
        ]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = mix_training_sources(
            &u,
            Platform::Twitter,
            &[Platform::Instagram, Platform::Foursquare],
            100,
            &mut rng,
        )
        .unwrap();
        assert_eq!(count(&m.timeline, Platform::Instagram), 20);
        assert_eq!(count(&m.timeline, Platform::Foursquare), 20);
        assert_eq!(count(&m.timeline, Platform::Twitter), 60);
    }

    #[test]
    fn no_extras_is_primary_only() {
        let u = user(&[(Platform::Twitter, 30)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = mix_training_sources(&u, Platform::Twitter, &[], 10, &mut rng).unwrap();
        assert_eq!(m.timeline.len(), 10);
        assert_eq!(count(&m.timeline, Platform::Twitter), 10);
    }

    #[test]
    fn short_extra_is_backfilled() {
        let u = user(&[(Platform::Twitter, 200), (Platform::Instagram, 5)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = mix_training_sources(&u, Platform::Twitter, &[Platform::Instagram], 100, &mut rng).unwrap();
        assert_eq!(count(&m.timeline, Platform::Instagram), 5);
        assert_eq!(count(&m.timeline, Platform::Twitter), 95);
        assert_eq!(m.warnings.len(), 1);
    }

    #[test]
    fn small_budget_and_missing_platform_rejected() {
        let u = user(&[(Platform::Twitter, 200)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(mix_training_sources(&u, Platform::Twitter, &[], 4, &mut rng).is_err());
        assert!(matches!(
            mix_training_sources(&u, Platform::Twitter, &[Platform::Instagram], 10, &mut rng),
            Err(Error::MissingPlatform { .. })
        ));
    }

    #[test]
    fn quotas_follow_floor_policy() {
        for total in 5..500 {
            let one = mixing_quotas(total, 1);
            assert_eq!(one, vec![((total as f64 * 0.2).floor() as usize).max(1)]);
            let two: usize = mixing_quotas(total, 2).iter().sum();
            let want = (total as f64 * 0.4).floor() as usize;
            assert!(two <= want && two + 1 >= want, "total={total}");
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let u = user(&[(Platform::Twitter, 200), (Platform::Instagram, 50)]);
        let run = |s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            mix_training_sources(&u, Platform::Twitter, &[Platform::Instagram], 50, &mut rng)
                .unwrap()
                .timeline
        };
        assert_eq!(run(3), run(3));
        assert_ne!(run(3), run(4));
    }
}
