// placeholder until the criteria suite lands; fails on purpose
int main() { return 1; }
