"""Bundled per-language seed texts for the n-gram language profiles.

Short everyday prose with caption-like vocabulary (people, animals,
scenes), a few sentences per language.  Profiles are built from these at
import time; adding a language means adding one entry here.
"""

SEED_TEXTS: dict[str, str] = {
    "en": (
        "A man is riding a horse along the beach while two dogs run beside "
        "him. The weather in the city was cold this morning, so we stayed "
        "home and drank coffee. She put the book on the table near the "
        "window and watched the rain. Children play football in the park "
        "every Saturday afternoon. The little girl in a red jacket is "
        "eating a slice of pizza next to her mother. There are many old "
        "houses with small gardens on the quiet street behind the market. "
        "A woman holding a cat stands in front of the door. The boy plays "
        "basketball at school with his friends after class."
    ),
    "de": (
        "Ein Mann reitet am Strand auf einem Pferd, während zwei Hunde "
        "neben ihm laufen. Das Wetter in der Stadt war heute Morgen kalt, "
        "deshalb sind wir zu Hause geblieben und haben Kaffee getrunken. "
        "Sie legte das Buch auf den Tisch am Fenster und schaute dem Regen "
        "zu. Die Kinder spielen jeden Samstag im Park Fußball. Das kleine "
        "Mädchen mit der roten Jacke isst ein Stück Pizza neben seiner "
        "Mutter. In der ruhigen Straße hinter dem Markt stehen viele alte "
        "Häuser mit kleinen Gärten."
    ),
    "fr": (
        "Un homme monte à cheval sur la plage pendant que deux chiens "
        "courent à côté de lui. Ce matin, il faisait froid dans la ville, "
        "alors nous sommes restés à la maison pour boire du café. Elle a "
        "posé le livre sur la table près de la fenêtre et a regardé la "
        "pluie tomber. Les enfants jouent au football dans le parc tous "
        "les samedis. La petite fille en veste rouge mange une part de "
        "pizza à côté de sa mère. Il y a beaucoup de vieilles maisons avec "
        "de petits jardins dans la rue calme derrière le marché."
    ),
    "es": (
        "Un hombre monta a caballo por la playa mientras dos perros corren "
        "a su lado. Esta mañana hacía frío en la ciudad, así que nos "
        "quedamos en casa tomando café. Ella puso el libro sobre la mesa "
        "junto a la ventana y miró la lluvia. Los niños juegan al fútbol "
        "en el parque todos los sábados. La niña pequeña con chaqueta roja "
        "come un trozo de pizza junto a su madre. Hay muchas casas "
        "antiguas con jardines pequeños en la calle tranquila detrás del "
        "mercado."
    ),
    "it": (
        "Un uomo cavalca un cavallo sulla spiaggia mentre due cani corrono "
        "accanto a lui. Questa mattina faceva freddo in città, così siamo "
        "rimasti a casa a bere il caffè. Ha messo il libro sul tavolo "
        "vicino alla finestra e ha guardato la pioggia. I bambini giocano "
        "a calcio nel parco ogni sabato pomeriggio. La bambina con la "
        "giacca rossa mangia una fetta di pizza accanto a sua madre. Ci "
        "sono molte case vecchie con piccoli giardini nella strada "
        "tranquilla dietro il mercato."
    ),
    "pt": (
        "Um homem anda a cavalo pela praia enquanto dois cães correm ao "
        "seu lado. Esta manhã fazia frio na cidade, então ficamos em casa "
        "bebendo café. Ela colocou o livro sobre a mesa perto da janela e "
        "olhou a chuva. As crianças jogam futebol no parque todos os "
        "sábados. A menina de casaco vermelho come um pedaço de pizza ao "
        "lado da mãe. Há muitas casas antigas com jardins pequenos na rua "
        "tranquila atrás do mercado."
    ),
    "nl": (
        "Een man rijdt op een paard langs het strand terwijl twee honden "
        "naast hem rennen. Het weer in de stad was vanochtend koud, dus we "
        "bleven thuis en dronken koffie. Ze legde het boek op de tafel bij "
        "het raam en keek naar de regen. De kinderen voetballen elke "
        "zaterdag in het park. Het kleine meisje met het rode jasje eet "
        "een stuk pizza naast haar moeder. Er staan veel oude huizen met "
        "kleine tuinen in de rustige straat achter de markt."
    ),
    "el": (
        "Ένας άντρας ιππεύει ένα άλογο στην παραλία ενώ δύο σκυλιά τρέχουν "
        "δίπλα του. Σήμερα το πρωί έκανε κρύο στην πόλη, έτσι μείναμε στο "
        "σπίτι και ήπιαμε καφέ. Έβαλε το βιβλίο στο τραπέζι κοντά στο "
        "παράθυρο και κοίταζε τη βροχή. Τα παιδιά παίζουν ποδόσφαιρο στο "
        "πάρκο κάθε Σάββατο. Το μικρό κορίτσι με το κόκκινο μπουφάν τρώει "
        "ένα κομμάτι πίτσα δίπλα στη μητέρα του. Υπάρχουν πολλά παλιά "
        "σπίτια με μικρούς κήπους στον ήσυχο δρόμο πίσω από την αγορά."
    ),
    "ru": (
        "Мужчина едет верхом на лошади по пляжу, а две собаки бегут рядом "
        "с ним. Сегодня утром в городе было холодно, поэтому мы остались "
        "дома и пили кофе. Она положила книгу на стол у окна и смотрела "
        "на дождь. Дети играют в футбол в парке каждую субботу. Маленькая "
        "девочка в красной куртке ест кусок пиццы рядом с мамой. На тихой "
        "улице за рынком много старых домов с маленькими садами."
    ),
    "zh": (
        "一个男人在海滩上骑马，两只狗在他旁边奔跑。今天早上城里很冷，所以我们留在家里喝咖啡。"
        "她把书放在窗边的桌子上，看着外面下雨。孩子们每个星期六都在公园里踢足球。"
        "穿红色外套的小女孩在妈妈旁边吃比萨。市场后面安静的街道上有许多带小花园的老房子。"
        "一个女人抱着一只猫站在门前。那个男孩和他的朋友一起在学校打篮球。"
    ),
    "ko": (
        "한 남자가 해변에서 말을 타고 있고 두 마리의 개가 그 옆에서 달리고 있다. "
        "오늘 아침 도시는 추워서 우리는 집에 머물며 커피를 마셨다. "
        "그녀는 창가 탁자 위에 책을 놓고 비를 바라보았다. "
        "아이들은 토요일마다 공원에서 축구를 한다. "
        "빨간 재킷을 입은 어린 소녀가 엄마 옆에서 피자를 먹고 있다. "
        "시장 뒤 조용한 거리에는 작은 정원이 있는 오래된 집이 많다."
    ),
    "ja": (
        "男の人が海辺で馬に乗っていて、二匹の犬がそのそばを走っている。"
        "今朝は町が寒かったので、家にいてコーヒーを飲んだ。"
        "彼女は窓のそばのテーブルに本を置いて、雨を眺めていた。"
        "子どもたちは毎週土曜日に公園でサッカーをする。"
        "赤いジャケットを着た小さな女の子が母親のとなりでピザを食べている。"
        "市場の裏の静かな通りには小さな庭のある古い家がたくさんある。"
    ),
}
