"""Regenerate the bundled toy fixtures under src/evipath/data/toy/.

Every question is declared once below. The script writes the two triple files,
the alias table, documents, web fixture, scripted transcript and dataset, so
fixtures stay consistent with each other.

    python3 scripts/build_toy_fixtures.py
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "evipath" / "data" / "toy"


@dataclass
class Item:
    id: str
    question: str
    answers: list[str]
    mentions: list[str]
    splits: list[str]
    skyline: str
    select: str
    answer: str
    kg: list[tuple[str, str, str, str, str, str]] = field(default_factory=list)  # file, hid, hl, rel, tid, tl
    docs: list[tuple[str, str, str]] = field(default_factory=list)  # entity, title, body
    web: list[tuple[str, str, str, str]] = field(default_factory=list)  # title, snippet, url, page body
    text_paths: list[tuple[str, str]] = field(default_factory=list)  # key phrase, reply
    refined: tuple[str, str] | None = None
    predictions: list[tuple[str, str]] = field(default_factory=list)
    generated: str = ""
    summary: str = ""


FB, WK = "freebase", "wikikg"

ITEMS = [
    Item(
        "cs-jillian", "What is the nationality of the wrestler who sang on A Jingle with Jillian?",
        ["American"], ["A Jingle with Jillian"],
        ['What wrestler sang on "A Jingle with Jillian"?',
         'What is the nationality of the performer of "A Jingle with Jillian"?'],
        '"wrestler" – sang on – "A Jingle with Jillian" – has nationality – answer(nationality)',
        "The graph should link the album to its artist; the nationality may need a web check. [action1 + action3]",
        "American",
        kg=[(FB, "m.jingle", "A Jingle with Jillian", "music.album.artist", "m.jillian", "Jillian Hall"),
            (FB, "m.jillian", "Jillian Hall", "people.person.nationality", "m.usa", "United States of America"),
            (FB, "m.jillian", "Jillian Hall", "people.person.profession", "m.wrestler", "Professional wrestler"),
            (FB, "m.jingle", "A Jingle with Jillian", "music.album.release_type", "m.album", "Album")],
        web=[("Jillian Hall - Biography", "American professional wrestler and singer.",
              "https://example.org/wrestlers/jillian-hall",
              "Jillian Hall is a professional wrestler best known for her time with WWE. "
              "She was born on September 6, 1980, in Ashland, Kentucky, and holds American nationality. "
              "In 2007 she released the holiday album A Jingle with Jillian.")],
        text_paths=[("holds American nationality",
                     "Paragraph 1: [{A Jingle with Jillian} - music.album.artist - {Jillian Hall} - birthplace - "
                     "{Ashland, Kentucky, United States} - implies nationality - {American}]")],
        predictions=[("American", '"Jillian Hall" – nationality – "American"')],
        generated="answer: {American}",
        summary="A Jingle with Jillian was recorded by Jillian Hall, who was born in Kentucky and is American.",
    ),
    Item(
        "cs-fury", "What movie was Logan Lerman in that was decorated by Barry Greaves?",
        ["Fury"], ["Logan Lerman", "Barry Greaves"],
        ["What movie was Logan Lerman in?", "Which person decorated the movie?"],
        "“Logan Lerman” – acted in – movie – decorated by – “Barry Greaves”",
        "Film credits live in the graph and the actor's encyclopedia page can confirm the role. "
        "[action1 + action2]",
        "Fury",
        kg=[(FB, "m.lerman", "Logan Lerman", "film.actor.film", "m.fury", "Fury"),
            (FB, "m.fury", "Fury", "film.film.film_set_decoration_by", "m.greaves", "Barry Greaves"),
            (FB, "m.lerman", "Logan Lerman", "film.actor.film", "m.perks", "The Perks of Being a Wallflower"),
            (FB, "m.greaves", "Barry Greaves", "film.film_set_designer.film_sets_designed", "m.unbroken",
             "Unbroken")],
        docs=[("m.lerman", "Logan Lerman",
               "Logan Wade Lerman is an American actor who began his career in commercials as a child. "
               "He had a leading part in the coming-of-age drama The Perks of Being a Wallflower in 2012. "
               "Lerman next starred in David Ayer's Second World War tank film Fury, playing a young soldier "
               "assigned to a Sherman crew. He has also appeared in several television series.")],
        text_paths=[("tank film Fury", "Paragraph 1: [{Logan Lerman} - starred in - {Fury}]\n"
                                       "Paragraph 2: [{Logan Lerman} - starred in - "
                                       "{The Perks of Being a Wallflower}]")],
        predictions=[("Fury", '"Logan Lerman" – starred in – "Fury" – set decoration by – "Barry Greaves"')],
        generated="answer: {Fury}",
        summary="Logan Lerman acted in Fury, and Barry Greaves did the set decoration for Fury.",
    ),
    Item(
        "cs-vicksburg", "What member of the Republican Party fought in the Battle of Vicksburg?",
        ["Ulysses S. Grant"], ["Siege of Vicksburg", "Republican Party"],
        ['What battle is also known as the "Siege of Vicksburg"?',
         'What member of the "Republican Party" fought in the "Battle of Vicksburg"?'],
        '"Siege of Vicksburg" – also known as – "Battle of Vicksburg" – fought by – answer(member) – '
        'member of – "Republican Party"',
        "The graph covers the battle and party membership; documents and the web can corroborate. "
        "[action1 + action2 + action3]",
        "Ulysses S. Grant",
        kg=[(FB, "m.siege", "Siege of Vicksburg", "also known as", "m.battle_vb", "Battle of Vicksburg"),
            (FB, "m.battle_vb", "Battle of Vicksburg", "fought by", "m.grant", "Ulysses S. Grant"),
            (FB, "m.grant", "Ulysses S. Grant", "member of", "m.gop", "Republican Party"),
            (FB, "m.battle_vb", "Battle of Vicksburg", "fought by", "m.pemberton", "John C. Pemberton"),
            (FB, "m.gop", "Republican Party", "founded in", "m.ripon", "Ripon, Wisconsin"),
            (WK, "Q_vicksburg", "Siege of Vicksburg", "participant", "Q_grant", "Ulysses S. Grant"),
            (WK, "Q_grant", "Ulysses S. Grant", "member of political party", "Q_gop", "Republican Party"),
            (WK, "Q_grant", "Ulysses S. Grant", "position held", "Q_president", "President of the United States"),
            (WK, "Q_vicksburg", "Siege of Vicksburg", "part of", "Q_civilwar", "American Civil War")],
        docs=[("m.siege", "Siege of Vicksburg",
               "The Siege of Vicksburg, also called the Battle of Vicksburg, lasted from May to July 1863. "
               "It ended the Vicksburg campaign of the American Civil War. "
               "Union forces under Major General Ulysses S. Grant fought the Battle of Vicksburg and forced "
               "the Confederate garrison to surrender. Control of the Mississippi River passed to the Union.")],
        web=[("Battle of Vicksburg | Civil War history", "Grant's army besieged the river fortress in 1863.",
              "https://example.org/civil-war/vicksburg",
              "The Battle of Vicksburg, or Siege of Vicksburg, was a decisive campaign of 1863. "
              "Union Major General Ulysses S. Grant fought at Vicksburg with the Army of the Tennessee. "
              "The surrender came on July 4.")],
        text_paths=[("fought the Battle of Vicksburg",
                     "Paragraph 1: [{Siege of Vicksburg} - also known as - {Battle of Vicksburg} - fought by - "
                     "{Ulysses S. Grant}]"),
                    ("fought at Vicksburg",
                     "Paragraph 1: [{Siege of Vicksburg} - also known as - {Battle of Vicksburg}] "
                     "[{Battle of Vicksburg} - fought by - {Ulysses S. Grant}]")],
        predictions=[("Ulysses S. Grant",
                      '"Battle of Vicksburg" – fought by – "Ulysses S. Grant" – member of – "Republican Party"')],
        generated="answer: {Ulysses S. Grant}",
        summary="The Siege of Vicksburg is the Battle of Vicksburg; Ulysses S. Grant fought there and was a "
                "Republican.",
    ),
    Item(
        "cs-mariner", "What team that has a mascot named Mariner Moose is in the American League West?",
        ["Seattle Mariners"], ["Mariner Moose", "American League West"],
        ['Which team has a mascot named "Mariner Moose"?',
         'Which team is in the "American League West" division?'],
        '"Mariner Moose" – mascot of – answer(team) – division – "American League West"',
        "Mascot and division facts are in the graph; encyclopedia and web pages can cross-check them. "
        "[action1 + action2 + action3]",
        "Seattle Mariners",
        kg=[(FB, "m.moose", "Mariner Moose", "sports.mascot.team", "m.mariners", "Seattle Mariners"),
            (FB, "m.mariners", "Seattle Mariners", "baseball.baseball_team.division", "m.alwest",
             "American League West"),
            (FB, "m.astros", "Houston Astros", "baseball.baseball_team.division", "m.alwest",
             "American League West")],
        docs=[("m.moose", "Mariner Moose",
               "The Mariner Moose is the team mascot of the Seattle Mariners, a Major League Baseball club "
               "that plays in the American League West. The mascot first appeared in 1990 after a contest "
               "among local schoolchildren.")],
        web=[("Seattle Mariners team facts", "Seattle's baseball club and its mascot.",
              "https://example.org/mlb/seattle-mariners",
              "The Seattle Mariners are a professional baseball team based in Seattle whose mascot is the "
              "Mariner Moose and which competes in the American League West division. "
              "The club plays home games at T-Mobile Park.")],
        text_paths=[("team mascot of the Seattle Mariners",
                     "Paragraph 1: [{Mariner Moose} - mascot of - {Seattle Mariners} - member of - "
                     "{American League West}]"),
                    ("whose mascot is the Mariner Moose",
                     "Paragraph 1: [{Mariner Moose} - team mascot of - {Seattle Mariners} - compete in - "
                     "{American League West}]")],
        predictions=[("Seattle Mariners", '"Mariner Moose" – mascot of – "Seattle Mariners"')],
        generated="answer: {Seattle Mariners}",
        summary="Mariner Moose is the mascot of the Seattle Mariners, who play in the American League West.",
    ),
    Item(
        "evolar", "Which company acquired the solar start-up Evolar?",
        ["First Solar"], ["Evolar"],
        ['Which company acquired "Evolar"?'],
        '"Evolar" – acquired by – answer(company)',
        "Corporate acquisitions are recorded in the graph, with documents as backup. [action1 + action2]",
        "First Solar",
        kg=[(FB, "m.evolar", "Evolar AB", "organization.organization.headquarters", "m.uppsala", "Uppsala"),
            (FB, "m.evolar", "Evolar AB", "organization.organization.industry", "m.pv", "Photovoltaics"),
            (WK, "Q_evolar", "Evolar", "acquired by", "Q_firstsolar", "First Solar"),
            (WK, "Q_firstsolar", "First Solar", "headquarters location", "Q_tempe", "Tempe, Arizona")],
        docs=[("m.evolar", "Evolar",
               "Evolar AB is a Swedish developer of thin-film perovskite solar technology based in Uppsala. "
               "In 2023 Evolar was acquired by First Solar, the American panel manufacturer.")],
        text_paths=[("Evolar was acquired by First Solar",
                     "Paragraph 1: [{Evolar} - acquired by - {First Solar}]")],
        predictions=[("First Solar", '"Evolar" – acquired by – "First Solar"')],
        generated="answer: {First Solar}",
        summary="Evolar was acquired by First Solar.",
    ),
    Item(
        "beethoven", "Which river flows through the city where Ludwig van Beethoven was born?",
        ["Rhine"], ["Ludwig van Beethoven"],
        ['In which city was "Ludwig van Beethoven" born?', "Which river flows through that city?"],
        '"Ludwig van Beethoven" – born in – city – river through – answer(river)',
        "Birthplaces and rivers are graph facts; the composer's page can confirm. [action1 + action2]",
        "Rhine",
        kg=[(FB, "m.beethoven", "Ludwig van Beethoven", "people.person.place_of_birth", "m.bonn", "Bonn"),
            (FB, "m.rhine", "Rhine", "geography.river.cities", "m.bonn", "Bonn"),
            (FB, "m.beethoven", "Ludwig van Beethoven", "music.composer.compositions", "m.eroica",
             "Symphony No. 3")],
        docs=[("m.beethoven", "Ludwig van Beethoven",
               "Ludwig van Beethoven was a German composer and pianist of the Classical and Romantic eras. "
               "Beethoven was born in Bonn, a city on the river Rhine, in December 1770. "
               "His Third Symphony was first performed in 1805.")],
        text_paths=[("born in Bonn", "Paragraph 1: [{Ludwig van Beethoven} - born in - {Bonn} - lies on - {Rhine}]")],
        predictions=[("Rhine", '"Bonn" – river through – "Rhine"')],
        generated="answer: {Rhine}",
        summary="Beethoven was born in Bonn, and the Rhine flows through Bonn.",
    ),
    Item(
        "hanks", "Who directed the film in which Tom Hanks played Forrest Gump?",
        ["Robert Zemeckis"], ["Tom Hanks"],
        ['In which film did "Tom Hanks" play Forrest Gump?', "Who directed that film?"],
        '"Tom Hanks" – acted in – "Forrest Gump" – directed by – answer(director)',
        "Film credits and directors are standard graph facts. [action1]",
        "Robert Zemeckis",
        kg=[(FB, "m.hanks", "Tom Hanks", "film.actor.film", "m.gump", "Forrest Gump"),
            (FB, "m.gump", "Forrest Gump", "film.film.directed_by", "m.zemeckis", "Robert Zemeckis"),
            (FB, "m.hanks", "Tom Hanks", "film.actor.film", "m.big", "Big"),
            (FB, "m.big", "Big", "film.film.directed_by", "m.marshall", "Penny Marshall")],
        predictions=[("Robert Zemeckis", '"Forrest Gump" – directed by – "Robert Zemeckis"')],
        generated="answer: {Robert Zemeckis}",
        summary="Tom Hanks acted in Forrest Gump, which Robert Zemeckis directed.",
    ),
    Item(
        "nairobi", "What currency is used in the country whose capital is Nairobi?",
        ["Kenyan shilling"], ["Nairobi"],
        ['Which country has "Nairobi" as its capital?', "What currency does that country use?"],
        '"Nairobi" – capital of – country – currency – answer(currency)',
        "The graph should hold both facts; the web can confirm the currency. [action1 + action3]",
        "Kenyan shilling",
        kg=[(FB, "m.kenya", "Kenya", "location.country.capital", "m.nairobi", "Nairobi"),
            (FB, "m.kenya", "Kenya", "location.country.currency_used", "m.kes", "Kenyan shilling"),
            (FB, "m.nairobi", "Nairobi", "location.location.time_zones", "m.eat", "East Africa Time")],
        web=[("Kenya currency guide", "What money to bring to Kenya.", "https://example.org/travel/kenya-money",
              "The Kenyan shilling is the currency of Kenya, the country whose capital is Nairobi. "
              "Banknotes come in denominations from 50 to 1000 shillings.")],
        text_paths=[("currency of Kenya",
                     "Paragraph 1: [{Nairobi} - capital of - {Kenya} - currency - {Kenyan shilling}]")],
        predictions=[("Kenyan shilling", '"Kenya" – currency – "Kenyan shilling"')],
        generated="answer: {Kenyan shilling}",
        summary="Nairobi is the capital of Kenya, whose currency is the Kenyan shilling.",
    ),
    Item(
        "four-seasons", "Which instrument did the composer of The Four Seasons play?",
        ["Violin"], ["The Four Seasons"],
        ['Who composed "The Four Seasons"?', "Which instrument did that composer play?"],
        '"The Four Seasons" – composed by – composer – played – answer(instrument)',
        "Composer and instrument are graph facts; the work's page can confirm. [action1 + action2]",
        "Violin",
        kg=[(FB, "m.seasons", "The Four Seasons", "music.composition.composer", "m.vivaldi", "Antonio Vivaldi"),
            (FB, "m.vivaldi", "Antonio Vivaldi", "music.group_member.instruments_played", "m.violin", "Violin"),
            (FB, "m.vivaldi", "Antonio Vivaldi", "people.person.place_of_birth", "m.venice", "Venice")],
        docs=[("m.seasons", "The Four Seasons",
               "The Four Seasons is a set of four violin concertos written by Antonio Vivaldi around 1718. "
               "Vivaldi, who played the violin as a virtuoso, led the premieres himself. "
               "Each concerto evokes one season of the year.")],
        text_paths=[("played the violin",
                     "Paragraph 1: [{The Four Seasons} - composed by - {Antonio Vivaldi} - played - {Violin}]")],
        predictions=[("Violin", '"Antonio Vivaldi" – played – "Violin"')],
        generated="answer: {Violin}",
        summary="The Four Seasons was composed by Antonio Vivaldi, who played the violin.",
    ),
    Item(
        "playstation", "In which country is the headquarters of the company that makes the PlayStation?",
        ["Japan"], ["PlayStation"],
        ['Which company makes the "PlayStation"?', "In which country is that company headquartered?"],
        '"PlayStation" – made by – company – headquartered in – answer(country)',
        "Manufacturer and headquarters should be in the graph; the web is a useful check. [action1 + action3]",
        "Japan",
        kg=[(FB, "m.ps", "PlayStation", "business.consumer_product.manufacturer", "m.sony", "Sony"),
            (FB, "m.sony", "Sony", "organization.organization.headquarters_country", "m.japan", "Japan"),
            (FB, "m.ps", "PlayStation", "cvg.cvg_platform.games", "m.crash", "Crash Bandicoot")],
        web=[("Sony corporate profile", "Company overview.", "https://example.org/companies/sony",
              "Sony, the company that makes the PlayStation, has its headquarters in Tokyo, Japan. "
              "It was founded in 1946.")],
        text_paths=[("has its headquarters in Tokyo",
                     "Paragraph 1: [{PlayStation} - made by - {Sony} - headquartered in - {Japan}]")],
        predictions=[("Japan", '"Sony" – headquartered in – "Japan"')],
        generated="answer: {Japan}",
        summary="The PlayStation is made by Sony, headquartered in Japan.",
    ),
    Item(
        "starry-night", "Which town is the birthplace of the painter of The Starry Night?",
        ["Zundert"], ["The Starry Night"],
        ['Who painted "The Starry Night"?', "Where was that painter born?"],
        '"The Starry Night" – painted by – painter – born in – answer(town)',
        "Artwork attribution and birthplaces are graph facts; encyclopedia pages can help. [action1 + action2]",
        "Zundert",
        kg=[(FB, "m.starry", "The Starry Night", "visual_art.artwork.artist", "m.vangogh", "Vincent van Gogh"),
            (FB, "m.vangogh", "Vincent van Gogh", "people.person.place_of_birth", "m.zundert", "Zundert"),
            (FB, "m.starry", "The Starry Night", "visual_art.artwork.owners", "m.moma", "Museum of Modern Art")],
        docs=[("m.starry", "The Starry Night",
               "The Starry Night is an oil-on-canvas painting by the Dutch painter Vincent van Gogh from 1889. "
               "It shows the view from his asylum room window just before sunrise. "
               "The canvas has been held by the Museum of Modern Art since 1941."),
              ("m.vangogh", "Vincent van Gogh",
               "Vincent van Gogh was a Dutch post-impressionist painter. "
               "Van Gogh was born in Zundert, a village in the south of the Netherlands, in 1853. "
               "He produced about 2,100 artworks in just over a decade.")],
        text_paths=[("was born in Zundert",
                     "Paragraph 1: [{Vincent van Gogh} - born in - {Zundert}]\n"
                     "Paragraph 2: [{The Starry Night} - painted by - {Vincent van Gogh}]"),
                    ("painting by the Dutch painter",
                     "Paragraph 1: [{The Starry Night} - painted by - {Vincent van Gogh}]")],
        refined=("Where was Vincent van Gogh born?", '"Vincent van Gogh" – born in – answer(town)'),
        predictions=[("Zundert", '"Vincent van Gogh" – born in – "Zundert"')],
        generated="answer: {Zundert}",
        summary="The Starry Night was painted by Vincent van Gogh.",
    ),
    Item(
        "petronas", "What language is spoken in the country where the Petronas Towers are located?",
        ["Malay", "Malay language"], ["Petronas Towers"],
        ['Where are the "Petronas Towers" located?', "Which language is spoken in that country?"],
        '"Petronas Towers" – located in – city – part of – country – language – answer(language)',
        "Location chains are in the graph; the web can confirm the language. [action1 + action3]",
        "Malay",
        kg=[(FB, "m.petronas", "Petronas Towers", "location.location.containedby", "m.kl", "Kuala Lumpur"),
            (FB, "m.kl", "Kuala Lumpur", "location.location.containedby", "m.malaysia", "Malaysia"),
            (FB, "m.malaysia", "Malaysia", "location.country.official_language", "m.malay", "Malay"),
            (FB, "m.petronas", "Petronas Towers", "architecture.structure.architect", "m.pelli", "César Pelli")],
        web=[("Visiting the Petronas Towers", "Kuala Lumpur's landmark twin towers.",
              "https://example.org/travel/petronas-towers",
              "The Petronas Towers stand in Kuala Lumpur, the capital of Malaysia, where the national language "
              "is Malay. Visitors can cross the skybridge on the 41st floor.")],
        text_paths=[("national language is Malay",
                     "Paragraph 1: [{Petronas Towers} - located in - {Kuala Lumpur} - capital of - {Malaysia} - "
                     "national language - {Malay}]")],
        predictions=[("Malay", '"Malaysia" – language – "Malay"')],
        generated="answer: {Malay}",
        summary="The Petronas Towers are in Kuala Lumpur, Malaysia, where Malay is spoken.",
    ),
    Item(
        "jordan", "Which team based in Chicago did Michael Jordan play for?",
        ["Chicago Bulls"], ["Michael Jordan", "Chicago"],
        ['Which teams did "Michael Jordan" play for?', 'Which of those teams is based in "Chicago"?'],
        '"Michael Jordan" – played for – answer(team) – based in – "Chicago"',
        "Rosters and team cities are graph facts; the player's page can confirm. [action1 + action2]",
        "Chicago Bulls",
        kg=[(FB, "m.jordan", "Michael Jordan", "sports.pro_athlete.teams", "m.bulls", "Chicago Bulls"),
            (FB, "m.bulls", "Chicago Bulls", "sports.sports_team.location", "m.chicago", "Chicago"),
            (FB, "m.jordan", "Michael Jordan", "sports.pro_athlete.teams", "m.wizards", "Washington Wizards"),
            (FB, "m.wizards", "Washington Wizards", "sports.sports_team.location", "m.dc", "Washington, D.C.")],
        docs=[("m.jordan", "Michael Jordan",
               "Michael Jordan is an American former professional basketball player. "
               "He played thirteen of his fifteen NBA seasons with the Chicago Bulls, a team based in Chicago. "
               "He finished his career with the Washington Wizards.")],
        text_paths=[("with the Chicago Bulls",
                     "Paragraph 1: [{Michael Jordan} - played for - {Chicago Bulls} - based in - {Chicago}]")],
        predictions=[("Chicago Bulls", '"Michael Jordan" – played for – "Chicago Bulls"')],
        generated="answer: {Chicago Bulls}",
        summary="Michael Jordan played for the Chicago Bulls, a team based in Chicago.",
    ),
    Item(
        "blade-runner", "Who wrote the novel that the film Blade Runner is based on?",
        ["Philip K. Dick"], ["Blade Runner"],
        ['Which novel is "Blade Runner" based on?', "Who wrote that novel?"],
        '"Blade Runner" – based on – novel – written by – answer(author)',
        "Adaptation and authorship are graph facts; the film's page can confirm. [action1 + action2]",
        "Philip K. Dick",
        kg=[(FB, "m.bladerunner", "Blade Runner", "film.film.based_on", "m.dads",
             "Do Androids Dream of Electric Sheep?"),
            (FB, "m.dads", "Do Androids Dream of Electric Sheep?", "book.written_work.author", "m.pkd",
             "Philip K. Dick"),
            (FB, "m.bladerunner", "Blade Runner", "film.film.directed_by", "m.scott", "Ridley Scott")],
        docs=[("m.bladerunner", "Blade Runner",
               "Blade Runner is a 1982 science fiction film directed by Ridley Scott. "
               "The screenplay adapts the novel Do Androids Dream of Electric Sheep, written by Philip K. Dick "
               "in 1968. The film was a box office disappointment on release.")],
        text_paths=[("adapts the novel",
                     "Paragraph 1: [{Blade Runner} - based on - {Do Androids Dream of Electric Sheep?} - "
                     "written by - {Philip K. Dick}]")],
        predictions=[("Philip K. Dick", '"Blade Runner" – based on – novel – written by – "Philip K. Dick"')],
        generated="answer: {Philip K. Dick}",
        summary="Blade Runner is based on a novel written by Philip K. Dick.",
    ),
    Item(
        "reef", "What is the capital of the country where the Great Barrier Reef is located?",
        ["Canberra"], ["Great Barrier Reef"],
        ['In which country is the "Great Barrier Reef"?', "What is the capital of that country?"],
        '"Great Barrier Reef" – located in – country – capital – answer(city)',
        "Both hops are graph facts; the web can confirm. [action1 + action3]",
        "Canberra",
        kg=[(FB, "m.reef", "Great Barrier Reef", "location.location.containedby", "m.australia", "Australia"),
            (FB, "m.australia", "Australia", "location.country.capital", "m.canberra", "Canberra"),
            (FB, "m.australia", "Australia", "location.location.contains", "m.sydney", "Sydney")],
        web=[("Great Barrier Reef facts", "The world's largest coral reef system.",
              "https://example.org/nature/great-barrier-reef",
              "The Great Barrier Reef lies off the coast of Queensland in Australia, a country whose capital is "
              "Canberra. It can be seen from outer space.")],
        text_paths=[("whose capital is Canberra",
                     "Paragraph 1: [{Great Barrier Reef} - located in - {Australia} - capital - {Canberra}]")],
        predictions=[("Canberra", '"Australia" – capital – "Canberra"')],
        generated="answer: {Canberra}",
        summary="The Great Barrier Reef is in Australia, whose capital is Canberra.",
    ),
    Item(
        "honolulu", "Which ocean surrounds the state whose capital is Honolulu?",
        ["Pacific Ocean"], ["Honolulu"],
        ['Which state has "Honolulu" as its capital?', "Which ocean surrounds that state?"],
        '"Honolulu" – capital of – state – surrounded by – answer(ocean)',
        "Geographic facts like these are well covered by the graph. [action1]",
        "Pacific Ocean",
        kg=[(FB, "m.hawaii", "Hawaii", "location.us_state.capital", "m.honolulu", "Honolulu"),
            (FB, "m.hawaii", "Hawaii", "location.location.adjoin_s", "m.pacific", "Pacific Ocean"),
            (FB, "m.honolulu", "Honolulu", "location.location.containedby", "m.oahu", "Oahu")],
        predictions=[("Pacific Ocean", '"Hawaii" – surrounded by – "Pacific Ocean"')],
        generated="answer: {Pacific Ocean}",
        summary="Honolulu is the capital of Hawaii, which lies in the Pacific Ocean.",
    ),
    Item(
        "iphone", "Who founded the company that produces the iPhone?",
        ["Steve Jobs", "Steve Wozniak", "Ronald Wayne"], ["iPhone"],
        ['Which company produces the "iPhone"?', "Who founded that company?"],
        '"iPhone" – produced by – company – founded by – answer(person)',
        "Products and founders are graph facts; the product page can confirm. [action1 + action2]",
        "Steve Jobs",
        kg=[(FB, "m.iphone", "iPhone", "business.consumer_product.manufacturer", "m.apple", "Apple Inc."),
            (FB, "m.apple", "Apple Inc.", "organization.organization.founders", "m.jobs", "Steve Jobs"),
            (FB, "m.apple", "Apple Inc.", "organization.organization.founders", "m.woz", "Steve Wozniak"),
            (FB, "m.iphone", "iPhone", "business.consumer_product.product_line", "m.smartphone", "Smartphone")],
        docs=[("m.iphone", "iPhone",
               "The iPhone is a line of smartphones produced by Apple Inc., the company co-founded by Steve Jobs. "
               "The first model went on sale in June 2007.")],
        text_paths=[("co-founded by Steve Jobs",
                     "Paragraph 1: [{iPhone} - produced by - {Apple Inc.} - co-founded by - {Steve Jobs}]")],
        predictions=[("Steve Jobs", '"Apple Inc." – founded by – "Steve Jobs"')],
        generated="answer: {Steve Jobs}",
        summary="The iPhone is produced by Apple Inc., founded by Steve Jobs and Steve Wozniak.",
    ),
    Item(
        "worldcup", "What is the official language of the country that won the 2010 FIFA World Cup?",
        ["Spanish", "Spanish Language"], ["2010 FIFA World Cup"],
        ['Which country won the "2010 FIFA World Cup"?', "What is the official language of that country?"],
        '"2010 FIFA World Cup" – won by – country – official language – answer(language)',
        "Tournament winners and languages are graph facts; the web can confirm. [action1 + action3]",
        "Spanish",
        kg=[(FB, "m.wc2010", "2010 FIFA World Cup", "sports.sports_championship_event.champion", "m.spain",
             "Spain"),
            (FB, "m.spain", "Spain", "location.country.official_language", "m.spanish", "Spanish Language"),
            (FB, "m.wc2010", "2010 FIFA World Cup", "sports.sports_championship_event.runner_up", "m.nl",
             "Netherlands")],
        web=[("2010 World Cup final recap", "Spain beat the Netherlands in Johannesburg.",
              "https://example.org/football/2010-final",
              "Spain won the 2010 FIFA World Cup in South Africa, and Spanish is the official language of the "
              "champions. Andrés Iniesta scored the winning goal in extra time.")],
        text_paths=[("Spanish is the official language",
                     "Paragraph 1: [{2010 FIFA World Cup} - won by - {Spain} - official language - {Spanish}]")],
        predictions=[("Spanish", '"Spain" – official language – "Spanish"')],
        generated="answer: {Spanish}",
        summary="Spain won the 2010 FIFA World Cup and its official language is Spanish.",
    ),
    Item(
        "angkor", "What is the main religion of the country where Angkor Wat is located?",
        ["Buddhism", "Theravada Buddhism"], ["Angkor Wat"],
        ['In which country is "Angkor Wat"?', "What is the main religion of that country?"],
        '"Angkor Wat" – located in – country – religion – answer(religion)',
        "Location and religion statistics are graph facts. [action1]",
        "Buddhism",
        kg=[(FB, "m.angkor", "Angkor Wat", "location.location.containedby", "m.cambodia", "Cambodia"),
            (FB, "m.cambodia", "Cambodia", "location.statistical_region.religions", "m.buddhism", "Buddhism"),
            (FB, "m.angkor", "Angkor Wat", "architecture.structure.style", "m.khmer", "Khmer architecture")],
        predictions=[("Buddhism", '"Cambodia" – religion – "Buddhism"')],
        generated="answer: {Hinduism}",
        summary="Angkor Wat is in Cambodia, where Buddhism is the main religion.",
    ),
    Item(
        "buzz", "Which studio produced the animated film featuring the character Buzz Lightyear?",
        ["Pixar", "Pixar Animation Studios"], ["Buzz Lightyear"],
        ['Which film features "Buzz Lightyear"?', "Which studio produced that film?"],
        '"Buzz Lightyear" – appears in – film – produced by – answer(studio)',
        "Characters and studios are graph facts; the character page can confirm. [action1 + action2]",
        "Pixar Animation Studios",
        kg=[(FB, "m.buzz", "Buzz Lightyear", "film.film_character.portrayed_in_films", "m.toystory", "Toy Story"),
            (FB, "m.toystory", "Toy Story", "film.film.production_companies", "m.pixar", "Pixar Animation Studios"),
            (FB, "m.buzz", "Buzz Lightyear", "fictional_universe.fictional_character.occupation", "m.ranger",
             "Space Ranger")],
        docs=[("m.buzz", "Buzz Lightyear",
               "Buzz Lightyear is a space ranger action figure in the Toy Story franchise. "
               "He first appeared in Toy Story, the 1995 film produced by Pixar Animation Studios. "
               "Tim Allen voices the character in the main films.")],
        text_paths=[("the 1995 film produced by Pixar",
                     "Paragraph 1: [{Buzz Lightyear} - appears in - {Toy Story} - produced by - "
                     "{Pixar Animation Studios}]")],
        predictions=[("Pixar Animation Studios", '"Toy Story" – produced by – "Pixar Animation Studios"')],
        generated="answer: {Pixar Animation Studios}",
        summary="Buzz Lightyear appears in Toy Story, produced by Pixar Animation Studios.",
    ),
]

ALIASES = [
    ("m.evolar", ["Evolar"]),
    ("m.siege", ["Vicksburg campaign siege"]),
    ("m.usa", ["USA", "United States"]),
    ("m.apple", ["Apple"]),
]


def transcript(item: Item) -> list[dict]:
    q = item.question
    rows = [
        {"kind": "topic_extract", "match": q,
         "response": "Topic Entities: " + ", ".join("{" + m + "}" for m in item.mentions)},
        {"kind": "question_analysis", "match": q,
         "response": "\n".join(f"split_question {i}: {s}" for i, s in enumerate(item.splits, 1))
         + f"\nSkyline Indicator: {item.skyline}"},
        {"kind": "source_select", "match": q, "response": item.select},
    ]
    for _, _, url, _ in item.web[:1]:
        rows.append({"kind": "path_select", "match": url, "repeat": True,
                     "response": ", ".join(f"Result {i}" for i in range(1, len(item.web) + 1))})
    for phrase, reply in item.text_paths:
        rows.append({"kind": "paragraph_to_path", "match": phrase, "repeat": True, "response": reply})
    rows.append({"kind": "paragraph_to_path", "match": q, "repeat": True,
                 "response": "Paragraph 1: none"})
    rows.append({"kind": "path_select", "match": q, "repeat": True, "response": "Path 1, Path 2, Path 3"})
    rows.append({"kind": "path_refine", "match": q, "repeat": True, "response": item.summary})
    rows.append({"kind": "cot_evaluate", "match": q, "repeat": True,
                 "response": f"{{Yes}} answer: {{{item.answer}}}\nreason: the paths connect the topic "
                             f"entities to {item.answer}."})
    new_q, new_ind = item.refined or (f"Which entity completes this chain: {item.skyline}?", item.skyline)
    rows.append({"kind": "refined_exploration", "match": q, "repeat": True,
                 "response": f"New Question: {new_q}\nSkyline Indicator: {new_ind}"})
    rows.append({"kind": "predict_exploration", "match": q, "repeat": True,
                 "response": "\n".join(f"Prediction {i}: {{{e}}}\nIndicator {i}: {ind}"
                                       for i, (e, ind) in enumerate(item.predictions, 1))})
    rows.append({"kind": "cot_generate", "match": q, "repeat": True,
                 "response": item.generated or f"answer: {{{item.answer}}}"})
    return rows


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    header = "# head_id\thead_label\trelation\ttail_id\ttail_label\n"
    files = {FB: [header], WK: [header]}
    docs, web, script, dataset = [], [], [], []
    for item in ITEMS:
        for src, hid, hl, rel, tid, tl in item.kg:
            files[src].append(f"{hid}\t{hl}\t{rel}\t{tid}\t{tl}\n")
        for ent, title, body in item.docs:
            docs.append({"entity": ent, "title": title, "body": body})
        if item.web:
            web.append({"query": item.question,
                        "results": [{"title": t, "snippet": s, "url": u} for t, s, u, _ in item.web],
                        "pages": {u: b for _, _, u, b in item.web}})
        script.extend(transcript(item))
        dataset.append({"id": item.id, "question": item.question, "answers": item.answers})
    (OUT / "freebase.tsv").write_text("".join(files[FB]), encoding="utf-8")
    (OUT / "wikikg.tsv").write_text("".join(files[WK]), encoding="utf-8")
    (OUT / "aliases.tsv").write_text("".join(f"{e}\t" + "\t".join(a) + "\n" for e, a in ALIASES),
                                     encoding="utf-8")

    def dump(name: str, rows: list[dict]) -> None:
        (OUT / name).write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")

    dump("docs.jsonl", docs)
    dump("web.jsonl", web)
    dump("transcript.jsonl", script)
    dump("dataset.jsonl", dataset)
    print(f"wrote {len(ITEMS)} items to {OUT}")


if __name__ == "__main__":
    main()
