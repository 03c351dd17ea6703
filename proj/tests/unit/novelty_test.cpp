#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "oee/novelty.hpp"
#include "oee/run.hpp"
#include "oracles.hpp"

using namespace oee;

TEST(Schema, RegistryBasics) {
  auto r = SchemaRegistry::with_seed();
  EXPECT_EQ(r.size(), 1u);
  EXPECT_TRUE(r.at(0).is_seed());
  EXPECT_EQ(r.at(0).arity, 2u);
  EXPECT_TRUE(r.at(0).allows(RuleKind::Destructive));
  r.add_genesis(KindAllowed::Both, 3, 17);
  EXPECT_OEE_ERROR(r.add_seed(KindAllowed::Both, 2), InvalidParameter);
  EXPECT_OEE_ERROR(r.add_genesis(KindAllowed::Both, 0, 1), InvalidParameter);
  EXPECT_OEE_ERROR(r.at(5), UnknownSchema);
  EXPECT_EQ(schema_registry_from_text(to_text(r)), r);
}

TEST(Genesis, ZeroProbabilityNeverFires) {
  auto r = SchemaRegistry::with_seed();
  Rng rng(1);
  for (Tick t = 1; t <= 1000; ++t) EXPECT_FALSE(genesis_schema(r, 0.0, rng, t));
  EXPECT_EQ(r.size(), 1u);
}

TEST(Genesis, CertainGenesisRaisesArity) {
  auto r = SchemaRegistry::with_seed();
  Rng rng(1);
  const auto s = genesis_schema(r, 1.0, rng, 4);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->arity, 3u);
  EXPECT_EQ(s->kind_allowed, KindAllowed::Both);
  EXPECT_EQ(s->genesis_tick, Tick{4});
  EXPECT_EQ(r.size(), 2u);
}

TEST(Genesis, CountFollowsBinomialBounds) {
  // Bounds [2, 25] leave well under 0.1% of Binomial(1e4, 1e-3) mass outside.
  EXPECT_LT(oracle::binomial_cdf(10000, 1e-3, 1), 1e-3);
  EXPECT_LT(1.0 - oracle::binomial_cdf(10000, 1e-3, 25), 1e-3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = SchemaRegistry::with_seed();
    Rng rng(seed);
    int count = 0;
    for (Tick t = 1; t <= 10000; ++t) count += genesis_schema(r, 1e-3, rng, t) ? 1 : 0;
    EXPECT_GE(count, 2) << "seed " << seed;
    EXPECT_LE(count, 25) << "seed " << seed;
  }
}

TEST(FixedLayer, DescriptorListsBuildingBlocks) {
  const auto d = MetamodelLayers::fixed_descriptor();
  for (auto block : {"entity", "milieu", "update", "adaptation", "target"}) {
    EXPECT_NE(d.find(block), std::string::npos) << block;
  }
  EXPECT_EQ(d, MetamodelLayers::fixed_descriptor());
}

TEST(Classify, RuleApplicationIsExploratory) {
  const MetamodelSnapshot before{8, 1}, after{8, 1};
  EXPECT_EQ(classify_event({EventKind::Created, 2, Cause::by_rule(7), 0}, before, after), NoveltyClass::Exploratory);
  EXPECT_EQ(classify_event({EventKind::Destroyed, 2, Cause::decay(), 0}, before, after), NoveltyClass::Exploratory);
  EXPECT_EQ(classify_event({EventKind::Created, 2, Cause::spontaneous(), 0}, before, after),
            NoveltyClass::Exploratory);
}

TEST(Classify, RuleUnderExistingSchemaIsExpansive) {
  EXPECT_EQ(classify_event({EventKind::RuleAdded, 8, {}, 0}, {8, 1}, {9, 1}), NoveltyClass::Expansive);
}

TEST(Classify, NewSchemaAndItsFirstRuleAreTransformational) {
  const MetamodelSnapshot before{8, 1}, after{9, 2};
  EXPECT_EQ(classify_event({EventKind::SchemaAdded, 1, {}, 0}, before, after), NoveltyClass::Transformational);
  EXPECT_EQ(classify_event({EventKind::RuleAdded, 8, {}, 1}, before, after), NoveltyClass::Transformational);
}

TEST(Classify, UnknownReferencesRaise) {
  const MetamodelSnapshot before{8, 1}, after{9, 2};
  EXPECT_OEE_ERROR(classify_event({EventKind::Created, 2, Cause::by_rule(8), 0}, before, after), UnknownRule);
  EXPECT_OEE_ERROR(classify_event({EventKind::RuleAdded, 3, {}, 0}, before, after), UnknownRule);
  EXPECT_OEE_ERROR(classify_event({EventKind::RuleAdded, 8, {}, 4}, before, after), UnknownSchema);
  EXPECT_OEE_ERROR(classify_event({EventKind::SchemaAdded, 0, {}, 0}, before, after), UnknownSchema);
}

TEST(Ledger, AppendCountsAndRegression) {
  Ledger ledger;
  EventBatch empty;
  empty.tick = 1;
  ledger_append(ledger, 1, empty, {});
  EXPECT_TRUE(ledger.records().empty());

  EventBatch b;
  b.tick = 2;
  b.created = {{1, Cause::spontaneous()}, {3, Cause::by_rule(0)}};
  b.rules_added = {{4, 0}};
  const MetamodelSnapshot before{4, 1}, after{5, 1};
  ledger_append(ledger, 2, b, classify_batch(b, before, after));
  EXPECT_EQ(ledger.records().size(), 3u);
  EXPECT_EQ(ledger.counts(), (NoveltyCounts{2, 1, 0}));
  EXPECT_OEE_ERROR(ledger_append(ledger, 1, b, classify_batch(b, before, after)), TickRegression);
  EXPECT_EQ(novelty_counts(ledger, 5, 9), NoveltyCounts{});
  EXPECT_EQ(novelty_counts(ledger, 0, 2), ledger.counts());
}

TEST(Ledger, PersistedLedgerReproducesCounters) {
  RunConfig c;
  c.e = 60;
  c.env_e = 6;
  c.n0 = 10;
  c.ticks = 800;
  c.p_schema = 0.01;
  c.seed = 4;
  const auto run = simulate(c);
  const auto text = to_jsonl(run.ledger);
  const auto back = ledger_from_jsonl(text);
  EXPECT_EQ(back, run.ledger);
  EXPECT_EQ(back.counts(), run.ledger.counts());
  EXPECT_EQ(to_jsonl(back), text);
  EXPECT_EQ(novelty_counts(back, 0, c.ticks), run.ledger.counts());
}

TEST(Ledger, CorruptLinesAreRejected) {
  EXPECT_OEE_ERROR(ledger_from_jsonl("{\"tick\": 1}\n"), CorruptLog);
  EXPECT_OEE_ERROR(ledger_from_jsonl("not json\n"), CorruptLog);
}

TEST(Properties, NoGenesisMeansNoTransformational) {
  RunConfig c;
  c.e = 80;
  c.env_e = 8;
  c.n0 = 10;
  c.ticks = 1500;
  c.p_schema = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    c.seed = seed;
    const auto run = simulate(c);
    EXPECT_EQ(run.ledger.counts().transformational, 0u);
    for (Tick t = 1; t <= c.ticks; t += 97) EXPECT_EQ(novelty_counts(run.ledger, t, t + 50).transformational, 0u);
  }
}

TEST(Properties, NoAdaptationMeansAllExploratory) {
  RunConfig c;
  c.e = 50;
  c.env_e = 5;
  c.n0 = 10;
  c.ticks = 500;
  c.p_schema = 0;
  c.rho_new = 0;
  const auto run = simulate(c);
  EXPECT_GT(run.ledger.counts().exploratory, 0u);
  EXPECT_EQ(run.ledger.counts().exploratory, run.ledger.counts().total());
}

TEST(Properties, SchemaPrecedesItsRulesAndRegistryGrows) {
  RunConfig c;
  c.e = 60;
  c.env_e = 6;
  c.n0 = 10;
  c.ticks = 1000;
  c.p_schema = 0.02;
  c.seed = 8;
  std::size_t last = 0;
  const auto run = simulate(c, [&last](const SystemModel& m, const EventBatch&) {
    ASSERT_GE(m.adaptation()->schemas.size(), last);
    last = m.adaptation()->schemas.size();
  });
  ASSERT_GT(run.schemas.size(), 1u);
  std::map<SchemaId, Tick> born;
  for (const auto& rec : run.ledger.records()) {
    if (rec.event.kind == EventKind::SchemaAdded) born[rec.event.subject] = rec.tick;
    if (rec.event.kind == EventKind::RuleAdded && rec.event.schema > 0) {
      ASSERT_TRUE(born.contains(rec.event.schema));
      EXPECT_LE(born[rec.event.schema], rec.tick);
    }
  }
  // Reclassifying from snapshots rebuilt out of the log gives the ledger back.
  MetamodelSnapshot snap{run.log.initial_rules, 1};
  std::size_t k = 0;
  for (const auto& batch : run.log.batches) {
    const MetamodelSnapshot after{snap.rules + batch.rules_added.size(), snap.schemas + batch.schemas_added.size()};
    for (auto cls : classify_batch(batch, snap, after)) ASSERT_EQ(run.ledger.records().at(k++).novelty, cls);
    snap = after;
  }
  EXPECT_EQ(k, run.ledger.records().size());
}
