// Generated by tests/oracles/generate.py (mpmath, 60-digit working precision).
// Columns: (nu, gamma, x, E_{nu,gamma}(x)).
pub const ML_REFERENCE: &[(f64, f64, f64, f64)] = &[
    (0.3, 1.0, -0.5, 6.3264900594359902138e-1),
    (0.3, 1.0, -1.0, 4.5659440832969066901e-1),
    (0.3, 1.0, -2.0, 2.9023222616787535326e-1),
    (0.3, 1.0, -4.0, 1.6650174431551664824e-1),
    (0.3, 1.0, -5.0, 1.3708086902027063758e-1),
    (0.3, 1.0, -7.5, 9.4995693498016270041e-2),
    (0.3, 1.0, -10.0, 7.2649729072772085356e-2),
    (0.3, 1.0, -20.0, 3.7406226213884452596e-2),
    (0.3, 1.0, -30.0, 2.5182617502927663063e-2),
    (0.3, 1.0, -49.0, 1.5535262877510990753e-2),
    (0.3, 1.0, -60.0, 1.271499032058584939e-2),
    (0.3, 1.0, -100.0, 7.6588562222866413892e-3),
    (0.3, 1.0, -200.0, 3.8406585600538580004e-3),
    (0.3, 1.0, -1000.0, 7.6993246495257768237e-4),
    (0.5, 1.0, -0.5, 6.1569034419292587487e-1),
    (0.5, 1.0, -1.0, 4.2758357615580700441e-1),
    (0.5, 1.0, -2.0, 2.5539567631050574387e-1),
    (0.5, 1.0, -4.0, 1.3699945762506138989e-1),
    (0.5, 1.0, -5.0, 1.1070463773306862637e-1),
    (0.5, 1.0, -7.5, 7.4573693062876683005e-2),
    (0.5, 1.0, -10.0, 5.6140992743822585858e-2),
    (0.5, 1.0, -20.0, 2.8174348741051319319e-2),
    (0.5, 1.0, -30.0, 1.8795888861416751497e-2),
    (0.5, 1.0, -49.0, 1.1511676863882963051e-2),
    (0.5, 1.0, -60.0, 9.4018542751763885888e-3),
    (0.5, 1.0, -100.0, 5.6416137829894329036e-3),
    (0.5, 1.0, -200.0, 2.8209126572120463987e-3),
    (0.5, 1.0, -1000.0, 5.641893014533876542e-4),
    (0.7, 1.0, -0.5, 6.0514759205956427126e-1),
    (0.7, 1.0, -1.0, 3.9961197811559938437e-1),
    (0.7, 1.0, -2.0, 2.1378672701529726519e-1),
    (0.7, 1.0, -4.0, 9.9760254890514619339e-2),
    (0.7, 1.0, -5.0, 7.7569357764769801692e-2),
    (0.7, 1.0, -7.5, 4.9440801830311776805e-2),
    (0.7, 1.0, -10.0, 3.6173265542309153332e-2),
    (0.7, 1.0, -20.0, 1.7395698291603977466e-2),
    (0.7, 1.0, -30.0, 1.1444251527526971691e-2),
    (0.7, 1.0, -49.0, 6.9345804736014357866e-3),
    (0.7, 1.0, -60.0, 5.646275166880420576e-3),
    (0.7, 1.0, -100.0, 3.3696874163059937557e-3),
    (0.7, 1.0, -200.0, 1.6780914801320821881e-3),
    (0.7, 1.0, -1000.0, 3.3454145717409954579e-4),
    (0.9, 1.0, -0.5, 6.0340549869586096762e-1),
    (0.9, 1.0, -1.0, 3.7606602142464188118e-1),
    (0.9, 1.0, -2.0, 1.6352830001693004885e-1),
    (0.9, 1.0, -4.0, 5.0411103314434622752e-2),
    (0.9, 1.0, -5.0, 3.4431324804098423905e-2),
    (0.9, 1.0, -7.5, 1.8662932471857279635e-2),
    (0.9, 1.0, -10.0, 1.2820606051102102705e-2),
    (0.9, 1.0, -20.0, 5.7495078161091138828e-3),
    (0.9, 1.0, -30.0, 3.7137076984598529581e-3),
    (0.9, 1.0, -49.0, 2.2213460906081457648e-3),
    (0.9, 1.0, -60.0, 1.8022340312846149897e-3),
    (0.9, 1.0, -100.0, 1.068972418287089285e-3),
    (0.9, 1.0, -200.0, 5.2997543888320925892e-4),
    (0.9, 1.0, -1000.0, 1.0528835943209591488e-4),
    (0.99, 1.0, -0.5, 6.0608995263141647835e-1),
    (0.99, 1.0, -1.0, 3.6854831806033961629e-1),
    (0.99, 1.0, -2.0, 1.3821728069806402584e-1),
    (0.99, 1.0, -4.0, 2.182778663398942965e-2),
    (0.99, 1.0, -5.0, 9.7680921391741255086e-3),
    (0.99, 1.0, -7.5, 2.4664680868175315007e-3),
    (0.99, 1.0, -10.0, 1.3478638060832072856e-3),
    (0.99, 1.0, -20.0, 5.6162348367495244904e-4),
    (0.99, 1.0, -30.0, 3.597560516821720766e-4),
    (0.99, 1.0, -49.0, 2.1404097766796095485e-4),
    (0.99, 1.0, -60.0, 1.734126143051652045e-4),
    (0.99, 1.0, -100.0, 1.0261344540995115483e-4),
    (0.99, 1.0, -200.0, 5.0788286036312322319e-5),
    (0.99, 1.0, -1000.0, 1.007694492000442879e-5),
    (0.7, 1.7, -2.0, 3.9310663649235136741e-1),
    (0.5, 0.5, -3.0, 2.718613000358643569e-2),
    (0.7, 0.4, -8.0, -2.7892995520093795721e-2),
    (0.6, 2.3, -12.0, 8.4742699228633430645e-2),
    (0.5, 1.5, -40.0, 2.4647491600415554659e-2),
    (0.8, 1.8, -75.0, 1.329395566162729503e-2),
    (1.0, 2.0, -3.0, 3.1673764387737868567e-1),
    (1.0, 1.5, -40.0, 1.4288114551916488671e-2),
    (1.0, 0.5, -7.0, -5.545047252046759689e-2),
    (0.7, 1.0, 2.0, 2.0966433131481951425e+1),
    (0.5, 1.0, 3.0, 1.6205988853999586625e+4),
    (0.9, 1.0, 10.0, 4.5173777456773778129e+5),
];

// Columns: (nu, xi, W_{-nu,1-nu}(-xi)).
pub const WRIGHT_REFERENCE: &[(f64, f64, f64)] = &[
    (0.3, 0.0, 7.7038318386656599884e-1),
    (0.3, 0.1, 7.2585380294645182513e-1),
    (0.3, 0.5, 5.6100164873166428287e-1),
    (0.3, 1.0, 3.9052334188638718059e-1),
    (0.3, 2.0, 1.6840030622678312459e-1),
    (0.3, 3.0, 6.3511233653723873626e-2),
    (0.3, 5.0, 6.4665392145191336779e-3),
    (0.3, 10.0, 4.681602611137840365e-6),
    (0.5, 0.0, 5.6418958354775628695e-1),
    (0.5, 0.1, 5.6278087121300959418e-1),
    (0.5, 0.5, 5.3000706468805712175e-1),
    (0.5, 1.0, 4.3939128946772239705e-1),
    (0.5, 2.0, 2.0755374871029735167e-1),
    (0.5, 3.0, 5.9465144611814685766e-2),
    (0.5, 5.0, 1.0891421151763548602e-3),
    (0.5, 10.0, 7.8354332655086676541e-12),
    (0.7, 0.0, 3.3427275256419055398e-1),
    (0.7, 0.1, 3.6159082632279274743e-1),
    (0.7, 0.5, 4.7185099500777112247e-1),
    (0.7, 1.0, 5.534214430665607005e-1),
    (0.7, 2.0, 2.4912885806519595984e-1),
    (0.7, 3.0, 7.4514746826409527186e-3),
    (0.7, 5.0, 1.286176116611190585e-12),
    (0.7, 10.0, 2.0035661278651212857e-122),
    (0.9, 0.0, 1.0511370061117778075e-1),
    (0.9, 0.1, 1.2473278550167993199e-1),
    (0.9, 0.5, 2.8004174208736584802e-1),
    (0.9, 1.0, 1.0081467456212710728),
    (0.9, 2.0, 7.8193669162221498296e-17),
];
